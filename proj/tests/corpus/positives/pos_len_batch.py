def flush(batch, sink):
    if len(batch) == 0:
        return 0
    sink.send(batch)
    return 1
