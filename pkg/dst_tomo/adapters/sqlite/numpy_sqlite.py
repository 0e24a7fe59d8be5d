#!/usr/bin/env python

'''
Lets NumPy scalars and small arrays be passed to the sqlite3 module.

Integer types become Python ints (values above 2^63 - 1 do not fit an SQLite
INTEGER and are stored as text), floating types become Python floats and 1-D
arrays are stored as JSON text, which is how lambda grids are kept.

# ---------------------------------------------------------------
# Ref: https://docs.python.org/3/library/sqlite3.html#how-to-adapt-custom-python-types-to-sqlite-values
'''

import json
import sqlite3

import numpy as np

SQLITE_INTEGER_MAX = 2 ** 63 - 1


def adapt_np_integer(value):
    value = int(value)
    return value if value <= SQLITE_INTEGER_MAX else str(value)


def adapt_np_floating(value):
    return float(value)


def adapt_np_bool(value):
    return int(value)


def adapt_np_array(array):
    if array.ndim != 1:
        raise ValueError(f"Only one-dimensional arrays can be stored, received shape {array.shape}.")
    return json.dumps([value.item() for value in array])


# sqlite3 looks adapters up by exact type, so every concrete class is registered
for integer_type in (np.int8, np.int16, np.int32, np.int64, np.uint8, np.uint16, np.uint32, np.uint64):
    sqlite3.register_adapter(integer_type, adapt_np_integer)
for floating_type in (np.float16, np.float32, np.float64):
    sqlite3.register_adapter(floating_type, adapt_np_floating)
sqlite3.register_adapter(np.bool_, adapt_np_bool)
sqlite3.register_adapter(np.ndarray, adapt_np_array)
