"""Stateful in-memory JSON analysis service (feeds the browser UI).

Endpoints:
    POST /game                     -> {"id", "toMove", "size", ...}
    POST /game/{id}/move           -> apply human move, engine replies
    GET  /game/{id}/analysis?budget=N
    POST /game/{id}/undo           -> revert plies (default 2: human + engine)

Errors: 404 unknown game, 409 illegal move, 400 malformed body.  Requests
are serialized per game id and run concurrently across games.
"""

from __future__ import annotations

import itertools
import threading
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .board import BoardError, EmptyHistoryError, GameOutcome
from .config import EngineConfig
from .engine import Engine


class MoveBody(BaseModel):
    row: int
    col: int


class UndoBody(BaseModel):
    plies: int = 2


class NewGameBody(BaseModel):
    size: Optional[int] = None


class _Game:
    def __init__(self, engine: Engine):
        self.engine = engine
        self.lock = threading.Lock()
        self.revision = 0


def create_app(config: EngineConfig | None = None,
               move_budget: Optional[int] = None,
               analysis_budget: int = 200) -> FastAPI:
    config = config or EngineConfig()
    app = FastAPI(title="linegom analysis service")
    games: dict[str, _Game] = {}
    ids = itertools.count(1)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed body"})

    def get_game(game_id: str) -> Optional[_Game]:
        return games.get(game_id)

    def state_payload(game: _Game) -> dict:
        payload = game.engine.state()
        payload["revision"] = game.revision
        return payload

    @app.post("/game")
    def new_game(body: NewGameBody | None = None):
        engine = Engine(config)
        if body is not None and body.size is not None:
            try:
                engine.new_game(body.size)
            except ValueError as exc:
                return JSONResponse(status_code=400, content={"error": str(exc)})
        game_id = f"g{next(ids)}"
        games[game_id] = _Game(engine)
        payload = state_payload(games[game_id])
        payload["id"] = game_id
        return payload

    @app.post("/game/{game_id}/move")
    def play_move(game_id: str, body: MoveBody):
        game = get_game(game_id)
        if game is None:
            return JSONResponse(status_code=404, content={"error": "unknown game"})
        with game.lock:
            engine = game.engine
            try:
                engine.play(body.row, body.col)
            except BoardError as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            game.revision += 1
            reply = None
            if engine.board.outcome is GameOutcome.ONGOING:
                row, col = engine.genmove(budget=move_budget)
                reply = {"row": row, "col": col}
                game.revision += 1
            payload = state_payload(game)
            payload["engineMove"] = reply
            ev = engine.evaluator.evaluate(engine.board) \
                if engine.board.outcome is GameOutcome.ONGOING else None
            payload["value"] = None if ev is None else \
                {"win": ev.win, "loss": ev.loss, "draw": ev.draw}
            return payload

    @app.get("/game/{game_id}/analysis")
    def analysis(game_id: str, budget: int = Query(default=0, ge=0), top_k: int = 10):
        game = get_game(game_id)
        if game is None:
            return JSONResponse(status_code=404, content={"error": "unknown game"})
        with game.lock:
            engine = game.engine
            if engine.board.outcome is not GameOutcome.ONGOING:
                return JSONResponse(status_code=409,
                                    content={"error": "game is over"})
            payload = engine.analysis(budget=budget or analysis_budget, top_k=top_k)
            payload["revision"] = game.revision
            payload["toMove"] = engine.state()["toMove"]
            return payload

    @app.post("/game/{game_id}/undo")
    def undo(game_id: str, body: UndoBody | None = None):
        game = get_game(game_id)
        if game is None:
            return JSONResponse(status_code=404, content={"error": "unknown game"})
        plies = body.plies if body is not None else 2
        if plies <= 0:
            return JSONResponse(status_code=400, content={"error": "plies must be positive"})
        with game.lock:
            engine = game.engine
            undone = 0
            try:
                for _ in range(min(plies, len(engine.board.move_stack))):
                    engine.undo()
                    undone += 1
            except EmptyHistoryError:
                pass
            if undone == 0:
                return JSONResponse(status_code=409, content={"error": "nothing to undo"})
            game.revision += 1
            payload = state_payload(game)
            payload["undone"] = undone
            return payload

    return app


def serve(config: EngineConfig | None = None, host: str = "127.0.0.1",
          port: int = 8000) -> None:
    import uvicorn
    uvicorn.run(create_app(config), host=host, port=port)
