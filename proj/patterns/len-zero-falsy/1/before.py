def empty(items):
    if len(items) == 0:
        return True
    return False
