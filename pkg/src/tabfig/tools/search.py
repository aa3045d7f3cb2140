"""Search toolkit: literature and web queries over upstream APIs.

All five tools go through the shared fetch-with-cache layer, so replay
mode answers from recorded fixtures and live mode records them.
"""

from __future__ import annotations

from urllib.parse import urlencode

from .net import cached_fetch
from .registry import ToolEnv

ARXIV_API = "http://export.arxiv.org/api/query"
PUBMED_API = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi"
S2_API = "https://api.semanticscholar.org/graph/v1/paper/search"
WIKI_API = "https://en.wikipedia.org/w/api.php"


def arxiv_searcher(params: dict, env: ToolEnv) -> str:
    query = {
        "search_query": (
            f"cat:{params['category']} AND all:{params['query']}"
            if params.get("category")
            else f"all:{params['query']}"
        ),
        "max_results": params.get("max_results", 5),
        "sortBy": params.get("sort_by", "relevance"),
    }
    return cached_fetch(env, "arxiv_searcher", params, f"{ARXIV_API}?{urlencode(query)}")


def pubmed_searcher(params: dict, env: ToolEnv) -> str:
    query = {
        "db": "pubmed",
        "term": params["query"],
        "retmax": params.get("max_results", 5),
        "retmode": "json",
    }
    if params.get("time_range"):
        query["term"] += f" AND {params['time_range']}[dp]"
    return cached_fetch(env, "pubmed_searcher", params, f"{PUBMED_API}?{urlencode(query)}")


def semantic_scholar_searcher(params: dict, env: ToolEnv) -> str:
    query = {
        "query": params["query"],
        "limit": params.get("max_results", 5),
        "fields": params.get("fields", "title,abstract,year,externalIds"),
    }
    if params.get("year"):
        query["year"] = params["year"]
    return cached_fetch(env, "semantic_scholar_searcher", params, f"{S2_API}?{urlencode(query)}")


def web_searcher(params: dict, env: ToolEnv) -> str:
    query = {"q": params["query"], "num": params.get("max_results", 5)}
    if params.get("language"):
        query["hl"] = params["language"]
    return cached_fetch(
        env, "web_searcher", params, f"{env.web_search_endpoint}?{urlencode(query)}"
    )


def wikipedia_searcher(params: dict, env: ToolEnv) -> str:
    if params.get("mode") == "summary":
        query = {
            "action": "query",
            "prop": "extracts",
            "titles": params["query"],
            "explaintext": 1,
            "format": "json",
        }
    else:
        query = {"action": "opensearch", "search": params["query"], "format": "json"}
    return cached_fetch(env, "wikipedia_searcher", params, f"{WIKI_API}?{urlencode(query)}")
