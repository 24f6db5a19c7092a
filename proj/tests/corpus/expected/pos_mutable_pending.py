def queue_task(task, pending=None):
    if pending is None:
        pending = []
    pending.append(task)
    print(len(pending))
    return pending
