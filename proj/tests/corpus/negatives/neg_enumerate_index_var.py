def fixed_probe(data, j):
    data = [2, 4, 6]
    probes = []
    for i in range(len(data)):
        probes.append(data[j])
    return probes
