def missing(key, store):
    if key not in store:
        return True
    return False
