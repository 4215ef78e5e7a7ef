"""Commerce state: catalog, customers, carts and orders, file-backed.

The store persists as a single JSON document written atomically
(temp file + rename).  Money is integer euro cents throughout.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import time
from dataclasses import asdict, dataclass, replace

CATEGORIES = ("books", "posters", "souvenirs", "cards")
PAYMENT_METHODS = ("snail_mail", "courier")

THUMB_BUDGET = 12000
PHOTO_BUDGET = 300000
WAP_IMG_BUDGET = 1000


class ShopError(Exception):
    pass


class ValidationError(ShopError):
    pass


class NotFound(ShopError):
    pass


class UsernameTaken(ShopError):
    pass


class AuthFailed(ShopError):
    """Uniform failure for unknown user and wrong password alike."""

    def __init__(self):
        super().__init__("invalid credentials")


class EmptyCart(ShopError):
    pass


class EmptyQuery(ShopError):
    pass


@dataclass
class Product:
    id: str
    name: str
    category: str
    price_cents: int
    description: str
    thumb_bytes: int
    photo_bytes: int
    wap_img_bytes: int
    inserted_seq: int


@dataclass
class Customer:
    username: str
    salt: str
    digest: str
    surname: str
    name: str
    address: str


@dataclass
class CartLine:
    product_id: str
    qty: int


@dataclass
class OrderLine:
    product_id: str
    name: str
    unit_price_cents: int
    qty: int


@dataclass
class Order:
    id: str
    username: str
    lines: list
    payment: str
    total_cents: int
    placed_at: float


def digest_password(salt: str, password: str) -> str:
    return hashlib.sha256((salt + password).encode("utf-8")).hexdigest()


def _check_product_fields(name: str, category: str, price_cents: int,
                          thumb_bytes: int, photo_bytes: int, wap_img_bytes: int) -> None:
    if not name.strip():
        raise ValidationError("product name is empty")
    if category not in CATEGORIES:
        raise ValidationError(f"unknown category '{category}'")
    if price_cents <= 0:
        raise ValidationError("price must be positive")
    if not 0 <= thumb_bytes <= THUMB_BUDGET:
        raise ValidationError(f"thumbnail over budget ({thumb_bytes} > {THUMB_BUDGET})")
    if not 0 <= photo_bytes <= PHOTO_BUDGET:
        raise ValidationError(f"photo over budget ({photo_bytes} > {PHOTO_BUDGET})")
    if not 0 <= wap_img_bytes <= WAP_IMG_BUDGET:
        raise ValidationError(f"wap image over budget ({wap_img_bytes} > {WAP_IMG_BUDGET})")


class Store:
    """Single-writer commerce store.

    All mutating methods persist before returning when a path is set.
    """

    def __init__(self, path: str | None = None):
        self.path = path
        self.products: dict = {}
        self.customers: dict = {}
        self.carts: dict = {}  # username -> list[CartLine]
        self.orders: list = []
        self.next_seq = 1
        if path is not None and os.path.exists(path):
            self._load(path)

    # -- persistence ---------------------------------------------------

    def _load(self, path: str) -> None:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        self.products = {p["id"]: Product(**p) for p in doc["products"]}
        self.customers = {c["username"]: Customer(**c) for c in doc["customers"]}
        self.carts = {
            entry["username"]: [CartLine(pid, qty) for pid, qty in entry["lines"]]
            for entry in doc["carts"]
        }
        self.orders = [
            Order(
                id=o["id"], username=o["username"],
                lines=[OrderLine(**line) for line in o["lines"]],
                payment=o["payment"], total_cents=o["total_cents"],
                placed_at=o["placed_at"],
            )
            for o in doc["orders"]
        ]
        self.next_seq = doc["next_seq"]

    def to_document(self) -> dict:
        return {
            "products": [asdict(p) for p in self._by_seq()],
            "customers": [asdict(c) for c in sorted(self.customers.values(), key=lambda c: c.username)],
            "carts": [
                {"username": username, "lines": [[l.product_id, l.qty] for l in lines]}
                for username, lines in sorted(self.carts.items())
                if lines
            ],
            "orders": [asdict(o) for o in self.orders],
            "next_seq": self.next_seq,
        }

    def save(self) -> None:
        if self.path is None:
            return
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(self.to_document(), f, ensure_ascii=False, indent=1)
        os.replace(tmp, self.path)

    # -- catalog ---------------------------------------------------------

    def _by_seq(self) -> list:
        return sorted(self.products.values(), key=lambda p: p.inserted_seq)

    def insert_product(self, name: str, category: str, price_cents: int,
                       description: str = "", thumb_bytes: int = THUMB_BUDGET,
                       photo_bytes: int = 200000, wap_img_bytes: int = 800) -> Product:
        _check_product_fields(name, category, price_cents, thumb_bytes, photo_bytes, wap_img_bytes)
        seq = self.next_seq
        self.next_seq += 1
        product = Product(
            id=f"p{seq}", name=name, category=category, price_cents=price_cents,
            description=description, thumb_bytes=thumb_bytes, photo_bytes=photo_bytes,
            wap_img_bytes=wap_img_bytes, inserted_seq=seq,
        )
        self.products[product.id] = product
        self.save()
        return product

    def update_product(self, product_id: str, **fields) -> Product:
        product = self.get_product(product_id)
        allowed = {"name", "category", "price_cents", "description",
                   "thumb_bytes", "photo_bytes", "wap_img_bytes"}
        unknown = set(fields) - allowed
        if unknown:
            raise ValidationError(f"unknown fields: {sorted(unknown)}")
        updated = replace(product, **fields)
        _check_product_fields(updated.name, updated.category, updated.price_cents,
                              updated.thumb_bytes, updated.photo_bytes, updated.wap_img_bytes)
        self.products[product_id] = updated
        self.save()
        return updated

    def get_product(self, product_id: str) -> Product:
        try:
            return self.products[product_id]
        except KeyError:
            raise NotFound(f"no product '{product_id}'") from None

    def all_products(self) -> list:
        return sorted(self.products.values(), key=lambda p: (p.name, p.id))

    def list_by_category(self, category: str) -> list:
        if category not in CATEGORIES:
            raise ValidationError(f"unknown category '{category}'")
        return [p for p in self.all_products() if p.category == category]

    def last_five(self) -> list:
        return sorted(self.products.values(), key=lambda p: -p.inserted_seq)[:5]

    def search_by_title(self, keyword: str) -> list:
        keyword = keyword.strip()
        if not keyword:
            raise EmptyQuery("search keyword is empty")
        needle = keyword.lower()
        return [p for p in self.all_products() if needle in p.name.lower()]

    # -- customers ---------------------------------------------------------

    def register_customer(self, username: str, password: str,
                          surname: str = "", name: str = "", address: str = "") -> Customer:
        if not username.strip():
            raise ValidationError("username is empty")
        if not password:
            raise ValidationError("password is empty")
        if username in self.customers:
            raise UsernameTaken(username)
        salt = secrets.token_hex(8)
        customer = Customer(
            username=username, salt=salt, digest=digest_password(salt, password),
            surname=surname, name=name, address=address,
        )
        self.customers[username] = customer
        self.save()
        return customer

    def authenticate(self, username: str, password: str) -> Customer:
        customer = self.customers.get(username)
        if customer is None or digest_password(customer.salt, password) != customer.digest:
            raise AuthFailed()
        return customer

    def get_customer(self, username: str) -> Customer:
        try:
            return self.customers[username]
        except KeyError:
            raise NotFound(f"no customer '{username}'") from None

    # -- carts ---------------------------------------------------------

    def cart(self, username: str) -> list:
        return list(self.carts.get(username, []))

    def cart_add(self, username: str, product_id: str, qty: int = 1) -> list:
        self.get_customer(username)
        self.get_product(product_id)
        if qty < 1:
            raise ValidationError("quantity must be >= 1")
        lines = self.carts.setdefault(username, [])
        for line in lines:
            if line.product_id == product_id:
                line.qty += qty
                break
        else:
            lines.append(CartLine(product_id, qty))
        self.save()
        return self.cart(username)

    def cart_update(self, username: str, product_id: str, qty: int) -> list:
        self.get_customer(username)
        self.get_product(product_id)
        if qty < 0:
            raise ValidationError("quantity must be >= 0")
        lines = self.carts.setdefault(username, [])
        if qty == 0:
            lines[:] = [l for l in lines if l.product_id != product_id]
        else:
            for line in lines:
                if line.product_id == product_id:
                    line.qty = qty
                    break
            else:
                lines.append(CartLine(product_id, qty))
        self.save()
        return self.cart(username)

    # -- orders ---------------------------------------------------------

    def place_order(self, username: str, payment: str, now: float | None = None) -> Order:
        self.get_customer(username)
        if payment not in PAYMENT_METHODS:
            raise ValidationError(f"unknown payment method '{payment}'")
        lines = self.carts.get(username, [])
        if not lines:
            raise EmptyCart("cart is empty")
        snapshot = []
        total = 0
        for line in lines:
            product = self.get_product(line.product_id)
            snapshot.append(OrderLine(product.id, product.name, product.price_cents, line.qty))
            total += product.price_cents * line.qty
        order = Order(
            id=f"o{len(self.orders) + 1}", username=username, lines=snapshot,
            payment=payment, total_cents=total,
            placed_at=time.time() if now is None else now,
        )
        self.orders.append(order)
        self.carts[username] = []
        self.save()
        return order

    def list_orders(self, username: str) -> list:
        self.get_customer(username)
        mine = [o for o in self.orders if o.username == username]
        mine.sort(key=lambda o: (o.placed_at, int(o.id[1:])), reverse=True)
        return mine

    def get_order(self, order_id: str) -> Order:
        for order in self.orders:
            if order.id == order_id:
                return order
        raise NotFound(f"no order '{order_id}'")


def format_price(cents: int) -> str:
    return f"{cents // 100}.{cents % 100:02d} EUR"
