def has_key(key):
    return key in get_keys()
