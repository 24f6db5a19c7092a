def check(result):
    if result is None:
        return True
    return False
