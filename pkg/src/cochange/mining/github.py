"""GitHub REST v3 client for merged pull-request -> commit mappings.

Paginates /pulls and /pulls/{n}/commits to exhaustion, retries with
exponential backoff on rate limiting, and surfaces auth failures with the
endpoint and status. The session and sleep function are injectable so tests
replay recorded responses offline.
"""

import logging
import time

import requests

from ..errors import ApiError, AuthError

logger = logging.getLogger(__name__)

PER_PAGE = 100
MAX_RETRIES = 5
TOKEN_ENV_VAR = "GITHUB_TOKEN"


def fetch_pull_request_mapping(owner: str, name: str, token: str,
                               session=None, base_url: str = "https://api.github.com",
                               sleep=time.sleep, max_retries: int = MAX_RETRIES) -> dict[str, list[str]]:
    """cs_id ("PR-<number>") -> commit shas for all merged PRs targeting the
    default branch."""
    session = session or requests.Session()
    headers = {
        "Accept": "application/vnd.github+json",
        "Authorization": f"Bearer {token}",
    }

    def get(path, params=None):
        url = f"{base_url}{path}"
        for attempt in range(max_retries + 1):
            response = session.get(url, headers=headers, params=params or {})
            if response.status_code in (401, 403):
                remaining = response.headers.get("X-RateLimit-Remaining")
                if response.status_code == 403 and remaining == "0":
                    if attempt < max_retries:
                        delay = 2.0 ** attempt
                        logger.warning("rate limited on %s; retrying in %.0fs", path, delay)
                        sleep(delay)
                        continue
                    raise ApiError(f"rate limit exhausted after {max_retries} retries on {path}",
                                   endpoint=url, status=403)
                raise AuthError(f"authentication failed ({response.status_code}) on {path}",
                                endpoint=url, status=response.status_code)
            if response.status_code == 429:
                if attempt < max_retries:
                    sleep(2.0 ** attempt)
                    continue
                raise ApiError(f"rate limit exhausted after {max_retries} retries on {path}",
                               endpoint=url, status=429)
            if response.status_code == 404:
                raise ApiError(f"not found: {path}", endpoint=url, status=404)
            if response.status_code != 200:
                raise ApiError(f"unexpected status {response.status_code} on {path}",
                               endpoint=url, status=response.status_code)
            return response.json()
        raise ApiError(f"retries exhausted on {path}", endpoint=url, status=0)

    repo_info = get(f"/repos/{owner}/{name}")
    default_branch = repo_info.get("default_branch", "main")

    mapping: dict[str, list[str]] = {}
    page = 1
    while True:
        pulls = get(
            f"/repos/{owner}/{name}/pulls",
            params={"state": "closed", "base": default_branch, "per_page": PER_PAGE, "page": page},
        )
        if not pulls:
            break
        for pr in pulls:
            if not pr.get("merged_at"):
                continue
            number = pr["number"]
            shas: list[str] = []
            commits_page = 1
            while True:
                commits = get(
                    f"/repos/{owner}/{name}/pulls/{number}/commits",
                    params={"per_page": PER_PAGE, "page": commits_page},
                )
                if not commits:
                    break
                shas.extend(c["sha"] for c in commits)
                if len(commits) < PER_PAGE:
                    break
                commits_page += 1
            mapping[f"PR-{number}"] = shas
        if len(pulls) < PER_PAGE:
            break
        page += 1
    return mapping
