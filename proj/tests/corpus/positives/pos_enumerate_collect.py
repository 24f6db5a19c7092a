def emit_rows(sink):
    items = [10, 20, 30]
    out = []
    for k in range(len(items)):
        out.append(items[k])
    return out
