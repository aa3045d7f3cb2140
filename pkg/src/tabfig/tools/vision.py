"""Vision toolkit: image understanding delegated to a chat backend.

Each tool renders a task-specific prompt and attaches the image to the
request; the configured vision-capable backend does the looking.
"""

from __future__ import annotations

from pathlib import Path

from .registry import ToolEnv, ToolFailure


def _ask_with_image(env: ToolEnv, image: str, prompt: str) -> str:
    from ..gateway.backends import ChatTurn

    if env.gateway is None or env.vision_backend is None:
        raise ToolFailure("backend", "no vision backend configured")
    if not Path(image).exists():
        raise ToolFailure("not_found", f"no such image {image!r}")
    turn = ChatTurn(role="user", content=prompt, images=[image])
    return env.gateway.chat(env.vision_backend, [turn]).text


def ocr_extractor(params: dict, env: ToolEnv) -> str:
    language = params.get("language")
    prompt = "Transcribe all text visible in this image, preserving reading order."
    if language:
        prompt += f" The text is in {language}."
    return _ask_with_image(env, params["image"], prompt)


def figure_parser(params: dict, env: ToolEnv) -> str:
    prompt = (
        "Parse this scientific figure. Describe its axes, legends, data "
        "series, and the quantitative relationships it shows."
    )
    if params.get("query"):
        prompt += f" Pay particular attention to: {params['query']}"
    return _ask_with_image(env, params["image"], prompt)


def image_analyzer(params: dict, env: ToolEnv) -> str:
    prompt = "Analyze this image."
    if params.get("focus"):
        prompt += f" Focus on {params['focus']}."
    if params.get("detail") == "high":
        prompt += " Provide a detailed, element-by-element account."
    if params.get("query"):
        prompt += f" Question: {params['query']}"
    return _ask_with_image(env, params["image"], prompt)
