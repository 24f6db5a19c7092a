def tail_read(data):
    data = [7, 8]
    hits = 0
    for i in range(len(data)):
        hits = hits + 1
    last = data[i]
    return last
