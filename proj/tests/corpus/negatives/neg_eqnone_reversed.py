def reversed_compare(x):
    if None == x:
        return True
    return False
