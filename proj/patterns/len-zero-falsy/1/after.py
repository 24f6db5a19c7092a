def empty(items):
    if not items:
        return True
    return False
