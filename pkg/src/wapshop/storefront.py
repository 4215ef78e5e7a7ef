"""Deck generation for the shop's navigation map, plus the HTML channel.

Sessions are cookieless: a random token travels as the URL parameter
``s`` and as a hidden postfield through forms.  Page rendering is pure
(store snapshot + route + session state in), all mutation goes through
``handle_form``.
"""

from __future__ import annotations

import html as html_mod
import secrets
import time
from dataclasses import dataclass
from urllib.parse import parse_qsl, quote, urlencode

from . import shop, wml
from .shop import Store, format_price
from .wml import (
    Anchor, Break, Do, Image, Input, Paragraph, Postfield, Select, Table,
    Text, WmlCard, WmlDeck,
)

SESSION_PARAM = "s"
DEFAULT_IDLE_TTL = 30 * 60.0  # seconds
LOGO_SRC = "/img/logo.wbmp"
LOGO_BYTES = 900
LINE_WIDTH = 20

ROUTE_PATHS = frozenset({
    "intro", "menu", "login", "register", "new", "categories", "list",
    "product", "cart", "cart-add", "order-confirm", "order-done", "search",
    "results", "help", "orders", "admin-login", "admin-menu", "admin-insert",
    "admin-update",
})

# Routes the HTML comparison channel can render.
HTML_ROUTES = frozenset({"menu", "list", "product", "cart", "order-confirm"})


class _Sentinel:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self):
        return self._name


UNKNOWN = _Sentinel("UNKNOWN")
EXPIRED = _Sentinel("EXPIRED")


@dataclass(frozen=True)
class Admin:
    username: str


@dataclass
class Session:
    token: str
    principal: object  # shop.Customer or Admin
    last_access: float
    idle_ttl: float = DEFAULT_IDLE_TTL


class SessionRegistry:
    """Live tokens with sliding expiry; nothing is persisted."""

    def __init__(self, idle_ttl: float = DEFAULT_IDLE_TTL):
        self.idle_ttl = idle_ttl
        self._sessions: dict = {}

    def create(self, principal, now: float) -> Session:
        while True:
            token = secrets.token_hex(8)
            if token not in self._sessions:
                break
        session = Session(token, principal, now, self.idle_ttl)
        self._sessions[token] = session
        return session

    def resolve(self, token: str | None, now: float):
        """Returns the principal, or EXPIRED / UNKNOWN as plain values."""
        if not token or token not in self._sessions:
            return UNKNOWN
        session = self._sessions[token]
        if now - session.last_access > session.idle_ttl:
            del self._sessions[token]
            return EXPIRED
        session.last_access = now
        return session.principal


@dataclass(frozen=True)
class Route:
    path: str
    params: tuple = ()  # ordered (name, value) pairs

    def param(self, name: str, default: str | None = None):
        for k, v in self.params:
            if k == name:
                return v
        return default

    def url(self) -> str:
        base = "/" + self.path
        if not self.params:
            return base
        return base + "?" + urlencode(list(self.params))


def parse_route(url: str) -> Route:
    path, _, query = url.partition("?")
    params = tuple(parse_qsl(query, keep_blank_values=True))
    return Route(path.strip("/"), params)


def make_route(path: str, **params) -> Route:
    return Route(path, tuple((k, v) for k, v in params.items() if v is not None))


@dataclass
class FormResult:
    """Outcome of a form submission: a redirect on success, a deck on error."""
    effect: str
    redirect: Route | None = None
    deck: WmlDeck | None = None
    token: str | None = None
    order_id: str | None = None


def wrap_text(text: str, width: int = LINE_WIDTH) -> list:
    """Split text into Text/Break nodes with every line at most `width` chars."""
    nodes: list = []
    for raw_line in text.split("\n"):
        words = raw_line.split()
        lines: list = []
        current = ""
        for word in words:
            while len(word) > width:
                if current:
                    lines.append(current)
                    current = ""
                lines.append(word[:width])
                word = word[width:]
            if not current:
                current = word
            elif len(current) + 1 + len(word) <= width:
                current += " " + word
            else:
                lines.append(current)
                current = word
        if current:
            lines.append(current)
        for line in lines:
            if nodes:
                nodes.append(Break())
            nodes.append(Text(line))
    return nodes


class Storefront:
    def __init__(self, store: Store, sessions: SessionRegistry | None = None,
                 admins: dict | None = None, clock=time.time):
        self.store = store
        self.sessions = sessions or SessionRegistry()
        # username -> {"salt":…, "digest":…}
        self.admins = admins or {}
        self.clock = clock

    # -- helpers ---------------------------------------------------------

    def _resolve(self, route: Route, token: str | None = None):
        token = token or route.param(SESSION_PARAM)
        if token is None:
            return None, None
        principal = self.sessions.resolve(token, self.clock())
        if principal in (UNKNOWN, EXPIRED):
            return None, None
        return principal, token

    def _href(self, path: str, token: str | None, **params) -> str:
        route_params = dict(params)
        if token:
            route_params[SESSION_PARAM] = token
        return make_route(path, **route_params).url()

    def _dos(self, token: str | None) -> list:
        return [
            Do("prev", "Back", wml.BACK_TARGET),
            Do("options", "Menu", self._href("menu", token)),
        ]

    def _card(self, card_id: str, title: str, content: list,
              token: str | None) -> WmlDeck:
        return WmlDeck((WmlCard(card_id, title, tuple(content) + tuple(self._dos(token))),))

    def _error_deck(self, message: str, token: str | None = None) -> WmlDeck:
        return self._card("error", "Error", wrap_text(message), token)

    def _choice_deck(self) -> WmlDeck:
        # Anonymous by design: a dead token must not be propagated.
        content = wrap_text("Please log in first.") + [
            Break(),
            Anchor(self._href("login", None), "1. Log in"),
            Break(),
            Anchor(self._href("register", None), "2. Register"),
        ]
        return self._card("auth", "Log in needed", content, None)

    def _menu_list(self, items: list) -> list:
        nodes: list = []
        for i, (label, href) in enumerate(items, start=1):
            if nodes:
                nodes.append(Break())
            nodes.append(Anchor(href, f"{i}. {label}"))
        return nodes

    def _product_anchors(self, products: list, token: str | None) -> list:
        return self._menu_list([
            (p.name, self._href("product", token, id=p.id)) for p in products
        ])

    def asset_weights(self) -> dict:
        """Byte weights for every deck-referenced image, for lint and metrics."""
        weights = {LOGO_SRC: LOGO_BYTES}
        for product in self.store.products.values():
            weights[f"/img/{product.id}.wbmp"] = product.wap_img_bytes
        return weights

    def wml_fetcher(self):
        """Route-string fetcher over this storefront, e.g. for crawls."""
        def fetch(route: str) -> WmlDeck:
            return self.render_page(parse_route(route))
        return fetch

    # -- page rendering ----------------------------------------------------

    def render_page(self, route: Route | str, token: str | None = None) -> WmlDeck:
        if isinstance(route, str):
            route = parse_route(route)
        principal, token = self._resolve(route, token)
        customer = principal if isinstance(principal, shop.Customer) else None
        admin = principal if isinstance(principal, Admin) else None

        builder = getattr(self, "_page_" + route.path.replace("-", "_"), None)
        if route.path not in ROUTE_PATHS or builder is None:
            return self._error_deck(f"No such page: {route.path or '(empty)'}")

        if route.path in ("cart", "cart-add", "order-confirm", "order-done", "orders"):
            if customer is None:
                return self._choice_deck()
            return builder(route, customer, token)
        if route.path in ("admin-menu", "admin-insert", "admin-update"):
            if admin is None:
                return self._page_admin_login(make_route("admin-login"), None, None)
            return builder(route, admin, token)
        return builder(route, customer, token)

    def _page_intro(self, route, customer, token):
        content = [
            Image(LOGO_SRC, "museum logo"),
            Break(),
            Anchor(self._href("menu", token), "ENTER"),
        ]
        return self._card("intro", "Museum Shop", content, token)

    def _page_menu(self, route, customer, token):
        items = [
            ("Log in", self._href("login", token)),
            ("Register", self._href("register", token)),
            ("New arrivals", self._href("new", token)),
            ("Categories", self._href("categories", token)),
            ("Search", self._href("search", token)),
            ("Help", self._href("help", token)),
        ]
        return self._card("menu", "Museum Shop", self._menu_list(items), token)

    def _page_login(self, route, customer, token):
        content = [
            Text("Username:"), Input("u"),
            Break(), Text("Password:"), Input("p", "password"),
            Do("accept", "Log in", self._href("login", token)),
        ]
        return self._card("login", "Log in", content, token)

    def _page_register(self, route, customer, token):
        content = [
            Text("Username:"), Input("u"),
            Break(), Text("Password:"), Input("p", "password"),
            Break(), Text("Surname:"), Input("surname"),
            Break(), Text("First name:"), Input("name"),
            Break(), Text("Address:"), Input("address"),
            Do("accept", "Register", self._href("register", token)),
        ]
        return self._card("register", "Register", content, token)

    def _page_new(self, route, customer, token):
        products = self.store.last_five()
        content = self._product_anchors(products, token) if products \
            else [Text("No products yet.")]
        return self._card("new", "New arrivals", content, token)

    def _page_categories(self, route, customer, token):
        items = [
            (cat.capitalize(), self._href("list", token, cat=cat))
            for cat in shop.CATEGORIES
        ]
        items.append(("All products", self._href("list", token, cat="all")))
        return self._card("categories", "Categories", self._menu_list(items), token)

    def _page_list(self, route, customer, token):
        cat = route.param("cat", "")
        if cat == "all":
            products, title = self.store.all_products(), "All products"
        elif cat in shop.CATEGORIES:
            products, title = self.store.list_by_category(cat), cat.capitalize()
        else:
            return self._error_deck(f"No such category: {cat}", token)
        content = self._product_anchors(products, token) if products \
            else [Text("Nothing here yet.")]
        return self._card("list", title, content, token)

    def _page_product(self, route, customer, token):
        pid = route.param("id", "")
        try:
            product = self.store.get_product(pid)
        except shop.NotFound:
            return self._error_deck(f"No such product: {pid}", token)
        content = wrap_text(product.name) + [Break()]
        content += wrap_text(product.description)
        content += [
            Break(), Text(f"Price: {format_price(product.price_cents)}"),
            Break(), Image(f"/img/{product.id}.wbmp", product.name),
            Postfield("id", product.id),
        ]
        if token:
            content.append(Postfield(SESSION_PARAM, token))
        content.append(Do("accept", "Add to cart", self._href("cart-add", token)))
        return self._card("product", product.name, content, token)

    def _page_cart_add(self, route, customer, token):
        pid = route.param("id", "")
        try:
            product = self.store.get_product(pid)
        except shop.NotFound:
            return self._error_deck(f"No such product: {pid}", token)
        content = wrap_text(f"Added to cart: {product.name}.") + [
            Break(),
            Anchor(self._href("categories", token), "1. Keep shopping"),
            Break(),
            Anchor(self._href("cart", token), "2. View cart"),
        ]
        return self._card("cart-add", "In the cart", content, token)

    def _cart_rows(self, customer) -> list:
        rows = []
        for line in self.store.cart(customer.username):
            product = self.store.get_product(line.product_id)
            rows.append((product, line.qty))
        return rows

    def _page_cart(self, route, customer, token):
        rows = self._cart_rows(customer)
        if not rows:
            content = [Text("Cart is empty.")]
            return self._card("cart", "Your cart", content, token)
        total = sum(p.price_cents * qty for p, qty in rows)
        table = Table(tuple(
            (p.name, f"x{qty}", format_price(p.price_cents * qty))
            for p, qty in rows
        ))
        options = tuple(
            (f"{i}. {p.name}", p.id) for i, (p, _) in enumerate(rows, start=1)
        )
        content = [
            table,
            Text(f"Total: {format_price(total)}"),
            Break(), Text("Change quantity"), Break(),
            Text("(0 removes):"),
            Select("id", options),
            Input("qty"),
            Postfield(SESSION_PARAM, token or ""),
            Do("accept", "Update", self._href("cart", token)),
            Break(),
            Anchor(self._href("order-confirm", token), "Order now"),
        ]
        return self._card("cart", "Your cart", content, token)

    def _page_order_confirm(self, route, customer, token):
        rows = self._cart_rows(customer)
        if not rows:
            return self._error_deck("Cart is empty.", token)
        total = sum(p.price_cents * qty for p, qty in rows)
        content = wrap_text(f"{customer.name} {customer.surname}".strip())
        content += [Break()]
        content += wrap_text(customer.address or "(no address)")
        content += [
            Break(), Text(f"Total: {format_price(total)}"),
            Break(), Text("Payment method:"),
            Select("payment", (
                ("1. Snail mail", "snail_mail"),
                ("2. Courier", "courier"),
            )),
            Postfield(SESSION_PARAM, token or ""),
            Do("accept", "Confirm order", self._href("order-confirm", token)),
        ]
        return self._card("order-confirm", "Confirm order", content, token)

    def _page_order_done(self, route, customer, token):
        oid = route.param("oid", "")
        try:
            order = self.store.get_order(oid)
        except shop.NotFound:
            return self._error_deck(f"No such order: {oid}", token)
        if order.username != customer.username:
            return self._error_deck(f"No such order: {oid}", token)
        content = [
            Text(f"Order {order.id} placed."),
            Break(), Text(f"Total: {format_price(order.total_cents)}"),
            Break(), Anchor(self._href("menu", token), "Continue"),
        ]
        return self._card("order-done", "Thank you", content, token)

    def _page_search(self, route, customer, token):
        content = [
            Text("Title keyword:"), Input("q"),
        ]
        if token:
            content.append(Postfield(SESSION_PARAM, token))
        content.append(Do("accept", "Search", self._href("search", token)))
        return self._card("search", "Search", content, token)

    def _page_results(self, route, customer, token):
        keyword = route.param("q", "")
        try:
            products = self.store.search_by_title(keyword)
        except shop.EmptyQuery:
            return self._error_deck("Give a keyword.", token)
        content = self._product_anchors(products, token) if products \
            else [Text("No titles match.")]
        return self._card("results", "Results", content, token)

    def _page_help(self, route, customer, token):
        content = wrap_text(
            "Pay by snail mail or courier. Orders ship in five days. "
            "Questions? Ask at the museum desk."
        )
        content += [Break(), Anchor(self._href("orders", token), "My orders")]
        return self._card("help", "Help", content, token)

    def _page_orders(self, route, customer, token):
        orders = self.store.list_orders(customer.username)
        content: list = []
        if not orders:
            content.append(Text("No orders yet."))
        for order in orders:
            if content:
                content.append(Break())
            content.append(Text(f"{order.id}: {format_price(order.total_cents)}"))
        return self._card("orders", "My orders", content, token)

    def _page_admin_login(self, route, admin, token):
        content = [
            Text("Admin user:"), Input("u"),
            Break(), Text("Password:"), Input("p", "password"),
            Do("accept", "Log in", self._href("admin-login", None)),
        ]
        return self._card("admin-login", "Admin log in", content, None)

    def _page_admin_menu(self, route, admin, token):
        items = [
            ("Insert product", self._href("admin-insert", token)),
            ("Update product", self._href("admin-update", token)),
        ]
        return self._card("admin-menu", "Administration", self._menu_list(items), token)

    def _category_select(self) -> Select:
        return Select("category", tuple(
            (f"{i}. {cat.capitalize()}", cat)
            for i, cat in enumerate(shop.CATEGORIES, start=1)
        ))

    def _page_admin_insert(self, route, admin, token):
        content = [
            Text("Name:"), Input("name"),
            Break(), Text("Price (cents):"), Input("price"),
            Break(), Text("Description:"), Input("description"),
            Break(), Text("Category:"),
            self._category_select(),
            Postfield(SESSION_PARAM, token or ""),
            Do("accept", "Insert", self._href("admin-insert", token)),
        ]
        return self._card("admin-insert", "New product", content, token)

    def _page_admin_update(self, route, admin, token):
        products = self.store._by_seq()
        if not products:
            return self._error_deck("Catalog is empty.", token)
        options = tuple(
            (f"{i}. {p.name}", p.id) for i, p in enumerate(products, start=1)
        )
        content = [
            Text("Product:"),
            Select("id", options),
            Break(), Text("New name:"), Input("name"),
            Break(), Text("New price:"), Input("price"),
            Break(), Text("New descr.:"), Input("description"),
            Postfield(SESSION_PARAM, token or ""),
            Do("accept", "Update", self._href("admin-update", token)),
        ]
        return self._card("admin-update", "Edit product", content, token)

    # -- form handling ----------------------------------------------------

    def handle_form(self, route: Route | str, fields: dict,
                    token: str | None = None) -> FormResult:
        if isinstance(route, str):
            route = parse_route(route)
        token = fields.get(SESSION_PARAM) or token or route.param(SESSION_PARAM)
        handler = getattr(self, "_form_" + route.path.replace("-", "_"), None)
        if handler is None:
            return FormResult("no such form",
                              deck=self._error_deck(f"No such form: {route.path}"))
        try:
            return handler(fields, token)
        except shop.ShopError as exc:
            return FormResult(f"error: {exc}", deck=self._error_deck(str(exc), token))

    def _require_customer(self, token):
        principal = self.sessions.resolve(token, self.clock())
        if not isinstance(principal, shop.Customer):
            return None
        return principal

    def _form_login(self, fields, token):
        customer = self.store.authenticate(fields.get("u", ""), fields.get("p", ""))
        session = self.sessions.create(customer, self.clock())
        return FormResult(
            f"logged in as {customer.username}",
            redirect=make_route("menu", s=session.token),
            token=session.token,
        )

    def _form_register(self, fields, token):
        customer = self.store.register_customer(
            fields.get("u", ""), fields.get("p", ""),
            surname=fields.get("surname", ""), name=fields.get("name", ""),
            address=fields.get("address", ""),
        )
        session = self.sessions.create(customer, self.clock())
        return FormResult(
            f"registered {customer.username}",
            redirect=make_route("menu", s=session.token),
            token=session.token,
        )

    def _form_cart_add(self, fields, token):
        customer = self._require_customer(token)
        pid = fields.get("id", "")
        if customer is None:
            return FormResult("log in needed", redirect=make_route("cart-add", id=pid))
        self.store.cart_add(customer.username, pid, 1)
        return FormResult(
            f"added {pid}",
            redirect=make_route("cart-add", id=pid, s=token),
        )

    def _form_cart(self, fields, token):
        customer = self._require_customer(token)
        if customer is None:
            return FormResult("log in needed", redirect=make_route("cart"))
        pid = fields.get("id", "")
        try:
            qty = int(fields.get("qty", ""))
        except ValueError:
            raise shop.ValidationError("quantity must be a number") from None
        self.store.cart_update(customer.username, pid, qty)
        return FormResult(f"set {pid} qty {qty}", redirect=make_route("cart", s=token))

    def _form_order_confirm(self, fields, token):
        customer = self._require_customer(token)
        if customer is None:
            return FormResult("log in needed", redirect=make_route("order-confirm"))
        order = self.store.place_order(
            customer.username, fields.get("payment", ""), now=self.clock())
        return FormResult(
            f"order {order.id} total {order.total_cents}",
            redirect=make_route("order-done", oid=order.id, s=token),
            order_id=order.id,
        )

    def _form_search(self, fields, token):
        keyword = fields.get("q", "").strip()
        if not keyword:
            raise shop.EmptyQuery("search keyword is empty")
        return FormResult(
            f"search {keyword!r}",
            redirect=make_route("results", q=keyword, s=token),
        )

    def _form_admin_login(self, fields, token):
        username = fields.get("u", "")
        password = fields.get("p", "")
        entry = self.admins.get(username)
        if entry is None or shop.digest_password(entry["salt"], password) != entry["digest"]:
            raise shop.AuthFailed()
        session = self.sessions.create(Admin(username), self.clock())
        return FormResult(
            f"admin {username} logged in",
            redirect=make_route("admin-menu", s=session.token),
            token=session.token,
        )

    def _require_admin(self, token):
        principal = self.sessions.resolve(token, self.clock())
        return principal if isinstance(principal, Admin) else None

    @staticmethod
    def _price_field(fields) -> int | None:
        raw = fields.get("price", "").strip()
        if not raw:
            return None
        try:
            return int(raw)
        except ValueError:
            raise shop.ValidationError("price must be an integer (euro cents)") from None

    def _form_admin_insert(self, fields, token):
        if self._require_admin(token) is None:
            return FormResult("admin log in needed", redirect=make_route("admin-login"))
        price = self._price_field(fields)
        if price is None:
            raise shop.ValidationError("price is required")
        kwargs = {}
        for budget_field in ("thumb_bytes", "photo_bytes", "wap_img_bytes"):
            if fields.get(budget_field, "").strip():
                try:
                    kwargs[budget_field] = int(fields[budget_field])
                except ValueError:
                    raise shop.ValidationError(f"{budget_field} must be an integer") from None
        product = self.store.insert_product(
            fields.get("name", ""), fields.get("category", ""), price,
            description=fields.get("description", ""), **kwargs,
        )
        return FormResult(f"inserted {product.id}",
                          redirect=make_route("admin-menu", s=token))

    def _form_admin_update(self, fields, token):
        if self._require_admin(token) is None:
            return FormResult("admin log in needed", redirect=make_route("admin-login"))
        updates = {}
        if fields.get("name", "").strip():
            updates["name"] = fields["name"]
        if fields.get("description", "").strip():
            updates["description"] = fields["description"]
        price = self._price_field(fields)
        if price is not None:
            updates["price_cents"] = price
        if fields.get("category", "").strip():
            updates["category"] = fields["category"]
        product = self.store.update_product(fields.get("id", ""), **updates)
        return FormResult(f"updated {product.id}",
                          redirect=make_route("admin-menu", s=token))

    # -- HTML channel ----------------------------------------------------

    def render_html_page(self, route: Route | str):
        """Minimal HTML rendering of the wired-web channel.

        Returns (bytes, assets) where assets is a list of (src, byte
        weight) pairs the page would additionally download.
        """
        if isinstance(route, str):
            route = parse_route(route)
        if route.path not in HTML_ROUTES:
            raise shop.NotFound(f"no HTML page for '{route.path}'")
        body, assets, title = self._html_body(route)
        page = (
            "<!DOCTYPE html>\n<html>\n<head>\n"
            '<meta charset="utf-8">\n'
            f"<title>{html_mod.escape(title)} - Natural History Museum Shop</title>\n"
            "<style>\n"
            "body { font-family: Georgia, serif; margin: 2em auto; max-width: 52em;\n"
            "       background: #f6f1e3; color: #2e2a1f; }\n"
            "header { border-bottom: 3px double #7a6a45; margin-bottom: 1.5em; }\n"
            "header h1 { color: #4d4026; letter-spacing: 0.05em; }\n"
            "nav a { margin-right: 1.2em; color: #365a2e; }\n"
            "table { border-collapse: collapse; width: 100%; }\n"
            "td, th { border: 1px solid #b5a87f; padding: 0.4em 0.8em; text-align: left; }\n"
            "img.thumb { float: right; margin: 0 0 1em 1em; border: 1px solid #7a6a45; }\n"
            ".price { font-weight: bold; color: #5e2f12; }\n"
            "footer { margin-top: 2em; font-size: 0.85em; color: #6b6a58; }\n"
            "</style>\n</head>\n<body>\n"
            "<header>\n<h1>Natural History Museum Shop</h1>\n"
            "<nav>"
            '<a href="/html/menu">Home</a>'
            + "".join(
                f'<a href="/html/list?cat={c}">{c.capitalize()}</a>'
                for c in shop.CATEGORIES
            )
            + "</nav>\n</header>\n"
            f"{body}\n"
            "<footer>Payment by snail mail or courier. "
            "All proceeds support the museum collection.</footer>\n"
            "</body>\n</html>\n"
        )
        return page.encode("utf-8"), assets

    def _html_body(self, route: Route):
        esc = html_mod.escape
        if route.path == "menu":
            items = "".join(
                f'<li><a href="/html/list?cat={c}">{c.capitalize()}</a></li>'
                for c in shop.CATEGORIES
            )
            body = (
                "<h2>Welcome</h2>\n"
                "<p>Browse the museum shop: books, posters, souvenirs and "
                "cards inspired by the collection.</p>\n"
                f"<ul>{items}</ul>\n"
            )
            return body, [], "Welcome"
        if route.path == "list":
            cat = route.param("cat", "")
            if cat == "all":
                products, title = self.store.all_products(), "All products"
            elif cat in shop.CATEGORIES:
                products, title = self.store.list_by_category(cat), cat.capitalize()
            else:
                return f"<p>No such category: {esc(cat)}</p>", [], "Not found"
            rows = "".join(
                f'<tr><td><a href="/html/product?id={p.id}">{esc(p.name)}</a></td>'
                f'<td class="price">{format_price(p.price_cents)}</td></tr>'
                for p in products
            )
            body = f"<h2>{esc(title)}</h2>\n<table><tr><th>Title</th><th>Price</th></tr>{rows}</table>"
            return body, [], title
        if route.path == "product":
            pid = route.param("id", "")
            try:
                product = self.store.get_product(pid)
            except shop.NotFound:
                return f"<p>No such product: {esc(pid)}</p>", [], "Not found"
            thumb_src = f"/img/{product.id}_thumb.jpg"
            body = (
                f"<h2>{esc(product.name)}</h2>\n"
                f'<img class="thumb" src="{thumb_src}" alt="{esc(product.name)}" '
                'width="120" height="120">\n'
                f"<p>{esc(product.description)}</p>\n"
                f'<p class="price">{format_price(product.price_cents)}</p>\n'
                f'<p><a href="/img/{product.id}_photo.jpg">Enlarged photo</a></p>\n'
                f'<form method="post" action="/html/cart-add">'
                f'<input type="hidden" name="id" value="{product.id}">'
                '<button>Add to cart</button></form>\n'
            )
            return body, [(thumb_src, product.thumb_bytes)], product.name
        if route.path == "cart":
            username = route.param("u", "")
            lines = self.store.carts.get(username, [])
            if not lines:
                return "<h2>Your cart</h2>\n<p>The cart is empty.</p>", [], "Your cart"
            rows, total = [], 0
            for line in lines:
                product = self.store.get_product(line.product_id)
                amount = product.price_cents * line.qty
                total += amount
                rows.append(
                    f"<tr><td>{esc(product.name)}</td><td>{line.qty}</td>"
                    f'<td class="price">{format_price(amount)}</td></tr>'
                )
            body = (
                "<h2>Your cart</h2>\n<table><tr><th>Item</th><th>Qty</th><th>Amount</th></tr>"
                + "".join(rows)
                + f'</table>\n<p class="price">Total: {format_price(total)}</p>\n'
                '<p><a href="/html/order-confirm?u=' + quote(username) + '">Check out</a></p>'
            )
            return body, [], "Your cart"
        if route.path == "order-confirm":
            username = route.param("u", "")
            lines = self.store.carts.get(username, [])
            total = sum(
                self.store.get_product(l.product_id).price_cents * l.qty for l in lines
            )
            body = (
                "<h2>Confirm your order</h2>\n"
                f'<p class="price">Total: {format_price(total)}</p>\n'
                '<form method="post" action="/html/order-confirm">'
                "<p>Payment: <select name=\"payment\">"
                '<option value="snail_mail">Snail mail</option>'
                '<option value="courier">Courier</option>'
                "</select></p>"
                "<button>Place order</button></form>\n"
            )
            return body, [], "Confirm order"
        raise shop.NotFound(route.path)
