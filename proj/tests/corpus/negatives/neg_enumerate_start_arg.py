def skip_first(data):
    data = [9, 9, 9]
    kept = []
    for i in range(1, len(data)):
        kept.append(data[i])
    return kept
