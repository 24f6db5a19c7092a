def append_none_default(x, acc=None):
    acc.append(x)
    return acc
