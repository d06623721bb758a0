"""Order totals."""


class Order:
    def __init__(self, items):
        self.items = items

    def total(self):
        """Sum the item prices of the order."""
        # skip free items
        return sum(i.price for i in self.items if i.price > 0)

    def is_empty(self):
        return not self.items or len(self.items) == 0
