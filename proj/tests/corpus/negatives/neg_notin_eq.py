def mismatch(flag, other):
    if not flag == other:
        return True
    return False
