def summarize(values):
    data = [3, 1, 4, 1, 5]
    total = 0
    for i in range(len(data)):
        print(data[i])
    return total
