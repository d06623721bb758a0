"""Post entries to the book."""

ledgr = {}


def load_uid(userid):
    # look up the uid first
    return ledgr.get(userid, "uid missing")
