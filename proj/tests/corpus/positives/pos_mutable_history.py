def log_event(event, history=[]):
    history.append(event)
    return history
