# Small helpers.
def clamp(value, low, high):
    """Clamp value between low and high."""
    return max(low, min(value, high))


def parse_flag(text):
    return text.lower() in ("1", "true", "yes") if text else False
