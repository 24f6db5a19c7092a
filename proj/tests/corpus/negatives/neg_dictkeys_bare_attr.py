def bound_method(key, table):
    return key in table.keys
