def fresh(item, bag):
    if item not in bag:
        return True
    return False
