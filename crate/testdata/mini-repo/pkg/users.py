"""User lookup helpers."""

# Cache of loaded users.
USERS = {}


def get_user_id(user):
    """Return the user id."""
    return user.id


def find_user(name, default=None):
    """Find a user by name."""
    for user in USERS.values():
        if user.name == name and user.active:
            return user
    return default
