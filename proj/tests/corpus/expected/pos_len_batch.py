def flush(batch, sink):
    if not batch:
        return 0
    sink.send(batch)
    return 1
