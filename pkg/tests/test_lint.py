import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wapshop.lint import (
    FETCH_RULE, LintPolicy, SiteGraph, bfs_depths, check_navigation, crawl_site,
    lint_deck,
)
from wapshop.wbxml import compiled_size
from wapshop.wml import (
    Anchor, Break, Do, Image, Text, WmlCard, WmlDeck,
)


def passing_deck():
    """A small deck that satisfies every rule of the default policy."""
    content = (
        Anchor("/a", "1. First"), Break(),
        Anchor("/b", "2. Second"), Break(),
        Anchor("/c", "3. Third"),
        Do("prev", "Back", "back"),
    )
    return WmlDeck((WmlCard("menu", "Menu", content),))


def rules_of(report):
    return sorted({v.rule for v in report.violations})


class TestRules:
    def test_passing_deck_passes(self):
        report = lint_deck(passing_deck())
        assert report.passed and report.checked_decks == 1

    def test_r1_exact_boundary(self):
        # Grow the text payload until the compiled form is exactly one
        # byte over the limit.
        def deck_with(n):
            filler = []
            line = "x" * 18
            for _ in range(n):
                filler.extend([Text(line), Break()])
            filler.append(Do("prev", "Back", "back"))
            return WmlDeck((WmlCard("c", "", tuple(filler)),))

        n = 1
        while compiled_size(deck_with(n)) < 1400:
            n += 1
        deck = deck_with(n)
        size = compiled_size(deck)
        policy = LintPolicy(max_compiled_bytes=size - 1)
        report = lint_deck(deck, policy)
        assert "R1" in rules_of(report)
        at_limit = LintPolicy(max_compiled_bytes=size)
        assert "R1" not in rules_of(lint_deck(deck, at_limit))

    def test_r2_page_weight_includes_images(self):
        deck = WmlDeck((WmlCard("c", "", (
            Image("/img/a.wbmp", "a"),
            Image("/img/b.wbmp", "b"),
            Do("prev", "Back", "back"),
        )),))
        weights = {"/img/a.wbmp": 600, "/img/b.wbmp": 700}
        size = compiled_size(deck)
        policy = LintPolicy(max_page_weight_bytes=size + 1299)
        assert "R2" in rules_of(lint_deck(deck, policy, weights))
        policy = LintPolicy(max_page_weight_bytes=size + 1300)
        assert "R2" not in rules_of(lint_deck(deck, policy, weights))

    def test_r3_menu_out_of_order(self):
        content = (
            Anchor("/a", "1. First"),
            Anchor("/b", "3. Wrong"),
            Anchor("/c", "2. Also wrong"),
            Do("prev", "Back", "back"),
        )
        deck = WmlDeck((WmlCard("menu", "", content),))
        assert rules_of(lint_deck(deck)) == ["R3"]

    def test_r3_two_anchors_exempt(self):
        content = (
            Anchor("/a", "Unnumbered"),
            Anchor("/b", "Also unnumbered"),
            Do("prev", "Back", "back"),
        )
        assert lint_deck(WmlDeck((WmlCard("c", "", content),))).passed

    def test_r3_select_options_always_numbered(self):
        from wapshop.wml import Select
        deck = WmlDeck((WmlCard("c", "", (
            Select("pay", (("Snail mail", "snail_mail"), ("Courier", "courier"))),
            Do("prev", "Back", "back"),
        )),))
        assert rules_of(lint_deck(deck)) == ["R3"]

    def test_r4_missing_back(self):
        deck = WmlDeck((WmlCard("c", "", (Text("hello"),)),))
        assert rules_of(lint_deck(deck)) == ["R4"]

    def test_r6_long_line(self):
        deck = WmlDeck((WmlCard("c", "", (
            Text("x" * 21),
            Do("prev", "Back", "back"),
        )),))
        assert rules_of(lint_deck(deck)) == ["R6"]

    def test_r6_breaks_reset_lines(self):
        deck = WmlDeck((WmlCard("c", "", (
            Text("x" * 20), Break(), Text("y" * 20),
            Do("prev", "Back", "back"),
        )),))
        assert lint_deck(deck).passed

    def test_r6_newlines_reset_lines(self):
        deck = WmlDeck((WmlCard("c", "", (
            Text(("x" * 20) + "\n" + ("y" * 20)),
            Do("prev", "Back", "back"),
        )),))
        assert lint_deck(deck).passed

    def test_r7_over_budget_image(self):
        deck = WmlDeck((WmlCard("c", "", (
            Image("/img/big.wbmp", "big"),
            Do("prev", "Back", "back"),
        )),))
        assert rules_of(lint_deck(deck, image_weights={"/img/big.wbmp": 1001})) == ["R7"]

    def test_r7_missing_weight(self):
        deck = WmlDeck((WmlCard("c", "", (
            Image("/img/unknown.wbmp", "pic"),
            Do("prev", "Back", "back"),
        )),))
        assert rules_of(lint_deck(deck)) == ["R7"]

    def test_r0_structural_defect_reported_not_raised(self):
        deck = WmlDeck((WmlCard("a"), WmlCard("a")))
        report = lint_deck(deck)
        assert rules_of(report) == ["R0"] and not report.passed

    def test_rule_independence(self):
        """Injecting a single defect flags exactly that rule."""
        base = passing_deck()
        card = base.cards[0]
        cases = {
            "R4": WmlDeck((WmlCard(card.id, card.title, card.content[:-1]),)),
            "R6": WmlDeck((WmlCard(card.id, card.title,
                                   (Text("z" * 21),) + card.content),)),
            "R3": WmlDeck((WmlCard(card.id, card.title, (
                Anchor("/a", "1. First"), Anchor("/b", "2. Second"),
                Anchor("/c", "9. Wrong"), Do("prev", "Back", "back"),
            )),)),
            "R7": WmlDeck((WmlCard(card.id, card.title,
                                   (Image("/img/x.wbmp", "x"),) + card.content),)),
        }
        for rule, deck in cases.items():
            assert rules_of(lint_deck(deck)) == [rule], rule

    def test_determinism(self):
        deck = passing_deck()
        assert lint_deck(deck) == lint_deck(deck)

    def test_policy_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            LintPolicy.from_overrides({"max_compiled_bytes": 1, "bogus": 2})

    def test_policy_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            LintPolicy(max_compiled_bytes=0)


def _site(pages):
    decks = {}
    for route, links in pages.items():
        content = [Do("prev", "Back", "back")]
        for i, target in enumerate(links, start=1):
            content.append(Anchor(target, f"{i}. Link"))
        decks[route] = WmlDeck((WmlCard("c", "", tuple(content)),))

    def fetch(route):
        return decks[route]

    return fetch


class TestCrawl:
    def test_single_page_site(self):
        graph, report = crawl_site(_site({"/home": []}), "/home")
        assert graph.nodes == ("/home",)
        assert graph.edges == ()
        assert report.checked_decks == 1

    def test_fetch_failure_recorded_and_crawl_continues(self):
        fetch = _site({"/home": ["/a", "/missing"], "/a": []})
        graph, report = crawl_site(fetch, "/home")
        fails = [v for v in report.violations if v.rule == FETCH_RULE]
        assert [v.where for v in fails] == ["/missing"]
        assert report.checked_decks == 2

    def test_graph_collects_all_reachable(self):
        fetch = _site({"/home": ["/a", "/b"], "/a": ["/b"], "/b": ["/home"]})
        graph, _ = crawl_site(fetch, "/home")
        assert set(graph.nodes) == {"/home", "/a", "/b"}
        assert ("/a", "/b", "1. Link") in graph.edges

    def test_accept_targets_not_followed(self):
        deck = WmlDeck((WmlCard("c", "", (
            Do("accept", "Buy", "/dangerous-side-effect"),
            Do("prev", "Back", "back"),
        )),))
        graph, _ = crawl_site(lambda r: deck, "/home")
        assert graph.nodes == ("/home",)


class TestNavigation:
    def test_linear_chain_depth_violation(self):
        graph = SiteGraph("root", ("root", "a", "b", "c", "d"), (
            ("root", "a", ""), ("a", "b", ""), ("b", "c", ""), ("c", "d", ""),
        ))
        violations = check_navigation(graph, LintPolicy())
        assert [v.where for v in violations] == ["d"]
        assert "R5a" in violations[0].message

    def test_product_with_single_predecessor(self):
        graph = SiteGraph("root", ("root", "/product?id=1"), (
            ("root", "/product?id=1", ""),
        ))
        violations = check_navigation(graph, LintPolicy())
        assert any("R5b" in v.message for v in violations)

    def test_product_with_two_predecessors_passes(self):
        graph = SiteGraph("root", ("root", "/list", "/product?id=1"), (
            ("root", "/list", ""), ("root", "/product?id=1", ""),
            ("/list", "/product?id=1", ""),
        ))
        assert check_navigation(graph, LintPolicy()) == []

    def test_depth_anchored_at_menu(self):
        # intro -> menu -> a -> b -> c is fine because depth counts from menu.
        graph = SiteGraph("/intro", ("/intro", "/menu", "/a", "/b", "/c"), (
            ("/intro", "/menu", ""), ("/menu", "/a", ""),
            ("/a", "/b", ""), ("/b", "/c", ""),
        ))
        assert check_navigation(graph, LintPolicy()) == []


def _brute_force_depths(nodes, edges, start):
    """Minimum path length by exhaustive simple-path enumeration."""
    adjacency = {n: [] for n in nodes}
    for f, t in edges:
        adjacency[f].append(t)
    best = {start: 0}

    def explore(node, depth, seen):
        for nxt in adjacency[node]:
            if nxt in seen:
                continue
            if nxt not in best or depth + 1 < best[nxt]:
                best[nxt] = depth + 1
            explore(nxt, depth + 1, seen | {nxt})

    explore(start, 0, {start})
    return best


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_bfs_matches_brute_force(n, seed):
    rng = random.Random(seed)
    nodes = [f"n{i}" for i in range(n)]
    edges = set()
    for _ in range(rng.randint(0, n * 2)):
        f, t = rng.choice(nodes), rng.choice(nodes)
        if f != t:
            edges.add((f, t))
    adjacency = {node: [] for node in nodes}
    for f, t in edges:
        adjacency[f].append(t)
    got = bfs_depths(adjacency, "n0")
    expected = _brute_force_depths(nodes, edges, "n0")
    assert got == expected


class TestReportRendering:
    def test_json_schema(self):
        report = lint_deck(passing_deck())
        doc = report.to_json_dict()
        assert set(doc) == {"violations", "checked_decks"}
        assert doc["checked_decks"] == 1

    def test_text_mentions_pass(self):
        assert lint_deck(passing_deck()).to_text().startswith("PASS")

    def test_text_lists_violations(self):
        deck = WmlDeck((WmlCard("c", "", (Text("hello"),)),))
        out = lint_deck(deck).to_text()
        assert out.startswith("FAIL") and "R4" in out
