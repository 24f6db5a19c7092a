def mapped_total(values):
    total = 0
    for v in values:
        total += abs(v)
    return total
