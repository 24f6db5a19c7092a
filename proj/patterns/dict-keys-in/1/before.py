def has(key, table):
    return key in table.keys()
