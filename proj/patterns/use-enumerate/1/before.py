def walk():
    data = [1, 2]
    for i in range(len(data)):
        data[i]
