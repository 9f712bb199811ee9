"""Pull-request mapping client against recorded fake responses."""

import pytest

from cochange.errors import ApiError, AuthError
from cochange.mining import fetch_pull_request_mapping
from cochange.mining.github import PER_PAGE


class FakeResponse:
    def __init__(self, status_code=200, payload=None, headers=None):
        self.status_code = status_code
        self._payload = payload if payload is not None else []
        self.headers = headers or {}

    def json(self):
        return self._payload


class FakeSession:
    """Routes GET requests to canned responses; records every call."""

    def __init__(self, routes):
        self.routes = routes  # (path_suffix, page) -> FakeResponse | [FakeResponse, ...]
        self.calls = []

    def get(self, url, headers=None, params=None):
        path = url.split("api.test")[-1]
        page = (params or {}).get("page", 1)
        self.calls.append((path, page))
        entry = self.routes.get((path, page))
        if entry is None:
            return FakeResponse(payload=[])
        if isinstance(entry, list):
            response = entry.pop(0) if len(entry) > 1 else entry[0]
            return response
        return entry


def repo_route(default_branch="main"):
    return {("/repos/o/r", 1): FakeResponse(payload={"default_branch": default_branch})}


def pr(number, merged=True):
    return {"number": number, "merged_at": "2024-01-01T00:00:00Z" if merged else None}


class TestFetchMapping:
    def test_two_merged_prs(self):
        routes = repo_route()
        routes[("/repos/o/r/pulls", 1)] = FakeResponse(payload=[pr(1), pr(2), pr(3, merged=False)])
        routes[("/repos/o/r/pulls/1/commits", 1)] = FakeResponse(payload=[{"sha": "a"}])
        routes[("/repos/o/r/pulls/2/commits", 1)] = FakeResponse(
            payload=[{"sha": "b"}, {"sha": "c"}, {"sha": "d"}])
        session = FakeSession(routes)
        mapping = fetch_pull_request_mapping("o", "r", "tok", session=session,
                                             base_url="https://api.test")
        assert mapping == {"PR-1": ["a"], "PR-2": ["b", "c", "d"]}

    def test_no_merged_prs(self):
        routes = repo_route()
        routes[("/repos/o/r/pulls", 1)] = FakeResponse(payload=[pr(9, merged=False)])
        mapping = fetch_pull_request_mapping("o", "r", "tok", session=FakeSession(routes),
                                             base_url="https://api.test")
        assert mapping == {}

    def test_paginates_to_exhaustion(self):
        routes = repo_route()
        first_page = [pr(i) for i in range(1, PER_PAGE + 1)]
        routes[("/repos/o/r/pulls", 1)] = FakeResponse(payload=first_page)
        routes[("/repos/o/r/pulls", 2)] = FakeResponse(payload=[pr(PER_PAGE + 1)])
        for i in range(1, PER_PAGE + 2):
            routes[(f"/repos/o/r/pulls/{i}/commits", 1)] = FakeResponse(payload=[{"sha": f"s{i}"}])
        session = FakeSession(routes)
        mapping = fetch_pull_request_mapping("o", "r", "tok", session=session,
                                             base_url="https://api.test")
        assert len(mapping) == PER_PAGE + 1
        assert ("/repos/o/r/pulls", 2) in session.calls

    def test_auth_error_carries_endpoint_and_status(self):
        routes = {("/repos/o/r", 1): FakeResponse(status_code=401)}
        with pytest.raises(AuthError) as exc_info:
            fetch_pull_request_mapping("o", "r", "expired", session=FakeSession(routes),
                                       base_url="https://api.test")
        assert exc_info.value.status == 401
        assert "/repos/o/r" in exc_info.value.endpoint

    def test_not_found(self):
        routes = {("/repos/o/r", 1): FakeResponse(status_code=404)}
        with pytest.raises(ApiError) as exc_info:
            fetch_pull_request_mapping("o", "r", "tok", session=FakeSession(routes),
                                       base_url="https://api.test")
        assert exc_info.value.status == 404

    def test_rate_limit_retries_with_backoff(self):
        limited = FakeResponse(status_code=403, headers={"X-RateLimit-Remaining": "0"})
        ok = FakeResponse(payload={"default_branch": "main"})
        routes = {
            ("/repos/o/r", 1): [limited, limited, ok],
            ("/repos/o/r/pulls", 1): FakeResponse(payload=[]),
        }
        delays = []
        mapping = fetch_pull_request_mapping("o", "r", "tok", session=FakeSession(routes),
                                             base_url="https://api.test", sleep=delays.append)
        assert mapping == {}
        assert delays == [1.0, 2.0]  # exponential backoff

    def test_rate_limit_exhaustion(self):
        limited = FakeResponse(status_code=403, headers={"X-RateLimit-Remaining": "0"})
        routes = {("/repos/o/r", 1): [limited]}
        with pytest.raises(ApiError, match="rate limit"):
            fetch_pull_request_mapping("o", "r", "tok", session=FakeSession(routes),
                                       base_url="https://api.test", sleep=lambda s: None,
                                       max_retries=2)

    def test_forbidden_without_rate_limit_header_is_auth_error(self):
        routes = {("/repos/o/r", 1): FakeResponse(status_code=403)}
        with pytest.raises(AuthError):
            fetch_pull_request_mapping("o", "r", "tok", session=FakeSession(routes),
                                       base_url="https://api.test")

    def test_idempotent(self):
        def make_session():
            routes = repo_route()
            routes[("/repos/o/r/pulls", 1)] = FakeResponse(payload=[pr(4)])
            routes[("/repos/o/r/pulls/4/commits", 1)] = FakeResponse(payload=[{"sha": "z"}])
            return FakeSession(routes)

        first = fetch_pull_request_mapping("o", "r", "tok", session=make_session(),
                                           base_url="https://api.test")
        second = fetch_pull_request_mapping("o", "r", "tok", session=make_session(),
                                            base_url="https://api.test")
        assert first == second == {"PR-4": ["z"]}
