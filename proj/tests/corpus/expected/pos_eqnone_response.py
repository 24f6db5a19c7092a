def unwrap(response, default):
    if response is None:
        return default
    return response.body
