def has_value(key, table):
    return key in table.values()
