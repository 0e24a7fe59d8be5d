#!/usr/bin/env python
#

import json
import logging
from datetime import datetime, timezone
from contextlib import contextmanager

import sqlalchemy
from sqlalchemy import create_engine, text, Column, Integer, Float, String, Text, DateTime, ForeignKey, select
from sqlalchemy.engine import make_url
from sqlalchemy.orm import sessionmaker, scoped_session, declarative_base, relationship

from .errors import ResultStoreError, ValidationError

logger = logging.getLogger("dst_tomo.results")

# Database type constants
DBTYPE_POSTGRESQL = "postgresql"
DBTYPE_MYSQL = "mysql"
DBTYPE_SQLITE = "sqlite"

Base = declarative_base()


class SweepRun(Base):
	''' One invocation of a sweep: its configuration and when it ran. '''
	__tablename__ = "sweep_runs"

	id = Column(Integer, primary_key=True)
	created = Column(DateTime(timezone=True), nullable=False)
	ensemble = Column(String(32), nullable=False)
	samples = Column(Integer, nullable=False)
	seed = Column(String(20), nullable=False)  # unsigned 64-bit does not fit every INTEGER
	lambda_grid = Column(Text, nullable=False)
	output_path = Column(Text)

	rows = relationship("SweepRowRecord", back_populates="run", order_by="SweepRowRecord.position",
						cascade="all, delete-orphan")

	@property
	def grid(self):
		return json.loads(self.lambda_grid)


class SweepRowRecord(Base):
	''' One lambda value of a stored sweep. '''
	__tablename__ = "sweep_rows"

	id = Column(Integer, primary_key=True)
	run_id = Column(Integer, ForeignKey("sweep_runs.id", ondelete="CASCADE"), nullable=False, index=True)
	position = Column(Integer, nullable=False)
	lam = Column("lambda", Float, nullable=False)
	e2_closed = Column(Float)
	e2_mc = Column(Float, nullable=False)
	e2_mc_stderr = Column(Float, nullable=False)
	e_min_mc = Column(Float, nullable=False)
	e_sic_pure = Column(Float, nullable=False)
	e_sic_mixed = Column(Float, nullable=False)

	run = relationship("SweepRun", back_populates="rows")

	def values(self):
		''' Values in CSV column order. '''
		return (self.lam, self.e2_closed, self.e2_mc, self.e2_mc_stderr, self.e_min_mc,
				self.e_sic_pure, self.e_sic_mixed, self.run.samples, int(self.run.seed))


@contextmanager
def session_scope(db):
	"""Provide a transactional scope around a series of operations."""
	session = db.Session()
	try:
		yield session
		session.commit()
	except sqlalchemy.exc.SQLAlchemyError as e:
		session.rollback()
		raise ResultStoreError(f"Result store transaction failed and was rolled back: {e}") from e
	except:
		session.rollback()
		raise
	finally:
		session.close()


class ResultsDatabase(object):
	'''This class defines an object that stores sweep results in a database.
	   It takes as its parameter the SQLAlchemy database connection string.

	   One object exists per connection string. The first time the object is
	   created for a string it connects, validates the connection and creates
	   the tables if needed. Calling

	   db = ResultsDatabase()

	   with no string returns the connection made most recently.
	'''
	_singletons = dict()
	_latest = None

	@staticmethod
	def determine_database_type(database_connection_string):
		'''
		Determine the database type from the connection string.

		:return: One of the DBTYPE_* constants
		:raises ValidationError: if database type cannot be determined from connection string
		'''
		if database_connection_string.startswith(('postgresql+psycopg://', 'postgresql://')):
			return DBTYPE_POSTGRESQL
		elif database_connection_string.startswith(('mysql://', 'mysql+pymysql://')):
			return DBTYPE_MYSQL
		elif database_connection_string.startswith('sqlite://'):
			return DBTYPE_SQLITE
		else:
			raise ValidationError(
				f"Unable to determine database type from connection string: '{ResultsDatabase.redacted(database_connection_string)}'. "
				f"Connection string must start with one of: 'postgresql+psycopg://', 'mysql+pymysql://', or 'sqlite://'"
			)

	@staticmethod
	def redacted(database_connection_string):
		''' The connection string with any password masked, for messages and logs. '''
		try:
			return make_url(database_connection_string).render_as_string(hide_password=True)
		except Exception:
			return database_connection_string

	@staticmethod
	def validate_connection(engine, database_type=None):
		'''
		Validate database connection with a simple query.

		:param engine: SQLAlchemy engine to test
		:param database_type: One of DBTYPE_* constants
		:return: True if connection successful
		:raises ResultStoreError: with detailed error message if connection fails
		'''
		url = engine.url.render_as_string(hide_password=True)
		try:
			with engine.connect() as conn:
				conn.execute(text('SELECT 1')).fetchone()
			logger.info(f"Result store connection validated ({database_type}): {url}")
			return True

		except sqlalchemy.exc.OperationalError as e:
			error_msg = str(e)

			if 'Access denied' in error_msg or '1045' in error_msg or 'password authentication failed' in error_msg:
				raise ResultStoreError(
					f"Result store authentication failed. Possible causes:\n"
					f"  1. Incorrect username or password in connection string\n"
					f"  2. User lacks connection privileges from this host\n"
					f"Connection string: {url}\n"
					f"Original error: {error_msg}"
				) from e
			elif 'unable to open database file' in error_msg:
				raise ResultStoreError(
					f"SQLite database file cannot be opened. Check that its directory exists and is writable.\n"
					f"Connection string: {url}\n"
					f"Original error: {error_msg}"
				) from e
			elif 'Connection refused' in error_msg or '2003' in error_msg:
				raise ResultStoreError(
					f"Cannot connect to database server. Possible causes:\n"
					f"  1. Database server is not running\n"
					f"  2. Wrong host or port in connection string\n"
					f"Connection string: {url}\n"
					f"Original error: {error_msg}"
				) from e
			else:
				raise ResultStoreError(
					f"Result store connection failed with unexpected error:\n"
					f"Connection string: {url}\n"
					f"Error: {error_msg}"
				) from e
		except (sqlalchemy.exc.SQLAlchemyError, ImportError) as e:
			raise ResultStoreError(
				f"Unexpected error while validating result store connection:\n"
				f"Connection string: {url}\n"
				f"Error: {e}"
			) from e

	@staticmethod
	def load_sqlite_database_adapters():
		'''
		Load SQLite-specific database adapters.
		'''
		from .adapters.sqlite import numpy_sqlite

	def __new__(cls, database_connection_string=None):
		"""This overrides the object's usual creation mechanism."""

		if database_connection_string is None:
			assert cls._latest is not None, "A database connection string must be specified!"
			return cls._latest

		if database_connection_string not in cls._singletons:
			me = object.__new__(cls) # just for convenience (think "self")

			me.database_connection_string = database_connection_string
			me.database_type = cls.determine_database_type(database_connection_string)

			if me.database_type == DBTYPE_SQLITE:
				cls.load_sqlite_database_adapters()

			try:
				me.engine = create_engine(me.database_connection_string, pool_pre_ping=True, echo=False)
			except (sqlalchemy.exc.ArgumentError, ImportError) as e:
				raise ResultStoreError(
					f"Could not create a database engine for '{cls.redacted(database_connection_string)}'. "
					f"Is the driver installed (pip install 'dst-tomo[postgresql]' or 'dst-tomo[mysql]')?\n"
					f"Error: {e}"
				) from e

			ResultsDatabase.validate_connection(me.engine, me.database_type)

			try:
				Base.metadata.create_all(me.engine)
			except sqlalchemy.exc.SQLAlchemyError as e:
				raise ResultStoreError(f"Could not create the result tables: {e}") from e

			me.Session = scoped_session(sessionmaker(me.engine, expire_on_commit=False))
			cls._singletons[database_connection_string] = me

		cls._latest = cls._singletons[database_connection_string]
		return cls._latest

	@classmethod
	def close_all(cls):
		''' Dispose of every engine and forget the connections. '''
		for db in cls._singletons.values():
			db.Session.remove()
			db.engine.dispose()
		cls._singletons.clear()
		cls._latest = None

	def store_sweep(self, config, rows):
		'''
		Store a sweep configuration and its rows.

		:param config: the ``SweepConfig`` that produced the rows
		:param rows: sequence of ``SweepRow``
		:return: the id of the new run
		'''
		with session_scope(self) as session:
			run = SweepRun(
				created=datetime.now(timezone.utc),
				ensemble=config.ensemble.value,
				samples=config.samples,
				seed=str(int(config.seed)),
				lambda_grid=json.dumps(list(config.lambda_grid)),
				output_path=config.output_path,
			)
			for position, row in enumerate(rows):
				run.rows.append(SweepRowRecord(
					position=position,
					lam=row.lam,
					e2_closed=row.e2_closed,
					e2_mc=row.e2_mc,
					e2_mc_stderr=row.e2_mc_stderr,
					e_min_mc=row.e_min_mc,
					e_sic_pure=row.e_sic_pure,
					e_sic_mixed=row.e_sic_mixed,
				))
			session.add(run)
			session.flush()
			run_id = run.id
		logger.info(f"Stored {len(rows)} sweep row(s) as run {run_id}")
		return run_id

	def runs(self):
		''' All stored runs, oldest first. '''
		with session_scope(self) as session:
			return list(session.scalars(select(SweepRun).order_by(SweepRun.id)))

	def rows(self, run_id):
		'''
		Rows of one run in grid order.

		:raises ValidationError: if there is no run with this id
		'''
		with session_scope(self) as session:
			run = session.get(SweepRun, run_id)
			if run is None:
				raise ValidationError(f"There is no stored sweep run with id {run_id}.")
			rows = list(run.rows)
			for row in rows:
				row.run  # load before the session closes
			return rows
