def add_entry(item, bag=[]):
    bag.append(item)
    return bag
