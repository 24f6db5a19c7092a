def check(result):
    if result == None:
        return True
    return False
