def normalize(payload):
    if isinstance(payload, dict):
        return payload
    return {"value": payload}
