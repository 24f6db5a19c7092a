def wrong_var(values, w):
    total = 0
    for v in values:
        total += w
    return total
