def drain(queue):
    if len(queue) == 0:
        return None
    return queue.pop()
