"""Backend access: chat, vision, embedding and segmentation services
behind one retrying gateway, with scripted mocks for offline runs."""
from .core import Gateway
from .http import (
    HttpChatBackend,
    HttpEmbeddingBackend,
    HttpVisionBackend,
    build_chat_body,
    build_vision_body,
)
from .scripted import (
    FileStoreSegmentationBackend,
    HashEmbeddingBackend,
    ScriptedChatBackend,
    ScriptedVisionBackend,
    Transcript,
)
from .types import (
    AttemptLog,
    BackendPolicy,
    ChatBackend,
    ChatMessage,
    ChatRequest,
    EmbeddingBackend,
    EmbeddingVector,
    SegmentationBackend,
    VisionBackend,
    VisionRequest,
    chat_request,
)

__all__ = [
    "Gateway",
    "BackendPolicy",
    "ChatMessage",
    "ChatRequest",
    "chat_request",
    "VisionRequest",
    "EmbeddingVector",
    "AttemptLog",
    "ChatBackend",
    "VisionBackend",
    "EmbeddingBackend",
    "SegmentationBackend",
    "Transcript",
    "ScriptedChatBackend",
    "ScriptedVisionBackend",
    "HashEmbeddingBackend",
    "FileStoreSegmentationBackend",
    "HttpChatBackend",
    "HttpEmbeddingBackend",
    "HttpVisionBackend",
    "build_chat_body",
    "build_vision_body",
]
