def missing(key, store):
    if not key in store:
        return True
    return False
