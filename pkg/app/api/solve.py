"""
Solve Endpoints
Handles POST /wmc, /count, /sample, /mpe and /map for weighted-DIMACS input.
"""

import logging
from typing import Callable, List, Literal, Optional

from fastapi import APIRouter, HTTPException, status
from pydantic import BaseModel, Field

from app import commands
from app.config import settings
from app.errors import ResourceLimitError, UnsatisfiableError
from app.logic.dimacs import DimacsParseError
from app.schemas import CountReport, RunConfig, SampleReport, VoteReport, WmcReport

# Configure logging
logger = logging.getLogger(__name__)

router = APIRouter()

# Request bodies larger than this are rejected before parsing
MAX_DIMACS_CHARS = 1_000_000


# =============================================================================
# Pydantic Models
# =============================================================================

class SolveRequest(BaseModel):
    """Request model for the solve endpoints"""
    dimacs: str = Field(
        ...,
        min_length=1,
        description="Weighted DIMACS text (p cnf header, clauses, optional `w <var> <w+> [<w->]` lines)",
        examples=["p cnf 3 3\n-1 3 0\n-2 3 0\n-1 -2 0\nw 1 0.55\nw 2 0.3\nw 3 0.7\n"],
    )
    seed: int = Field(default_factory=lambda: settings.SEED, ge=0, description="Random seed")
    shots: int = Field(default_factory=lambda: settings.SHOTS, ge=1, le=1_000_000)
    t_bits: Optional[int] = Field(default=None, ge=1, le=settings.MAX_QFT_BITS, description="Counting bits")
    query: Optional[List[int]] = Field(default=None, description="1-based query variables")
    method: Literal["all", "exact", "quantum", "classical"] = "all"
    qwmc_shots: Optional[int] = Field(default=None, ge=1)
    power_backend: Optional[Literal["matrix", "gates"]] = None
    samples: int = Field(default=100_000, ge=1, le=10_000_000, description="Classical estimator samples")


class ErrorResponse(BaseModel):
    """Error response model"""
    detail: str = Field(..., description="Error message")


_ERROR_RESPONSES = {
    400: {"description": "Malformed DIMACS or invalid parameters", "model": ErrorResponse},
    413: {"description": "Instance exceeds a simulator limit", "model": ErrorResponse},
    422: {"description": "Formula is unsatisfiable", "model": ErrorResponse},
    500: {"description": "Internal server error", "model": ErrorResponse},
}


def _run(command: str, handler: Callable, request: SolveRequest):
    """Build a RunConfig from the request, run the command, map errors to HTTP codes."""
    if len(request.dimacs) > MAX_DIMACS_CHARS:
        raise HTTPException(
            status_code=413,
            detail=f"DIMACS text exceeds {MAX_DIMACS_CHARS} characters",
        )
    try:
        config = RunConfig(
            command=command,
            seed=request.seed,
            shots=request.shots,
            t_bits=request.t_bits,
            query=request.query,
            method=request.method,
            qwmc_shots=request.qwmc_shots,
            power_backend=request.power_backend,
            samples=request.samples,
        )
        logger.info(f"Processing /{command} (seed {config.seed}, shots {config.shots})")
        return handler(config, request.dimacs)
    except UnsatisfiableError as e:
        logger.error(f"/{command}: unsatisfiable: {e}")
        raise HTTPException(status_code=422, detail=str(e))
    except (ResourceLimitError, MemoryError) as e:
        logger.error(f"/{command}: resource limit: {e}")
        raise HTTPException(status_code=413, detail=str(e))
    except (DimacsParseError, ValueError) as e:
        logger.error(f"/{command}: invalid input: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"/{command} failed: {e}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="An error occurred while running the simulation",
        )


# =============================================================================
# Endpoints
# =============================================================================

@router.post("/wmc", response_model=WmcReport, responses=_ERROR_RESPONSES, summary="Weighted model count")
async def solve_wmc(request: SolveRequest) -> WmcReport:
    """
    Exact WMC (small n), QWMC estimate and classical estimate.

    Args:
        request: SolveRequest with the weighted DIMACS text and run knobs

    Returns:
        WmcReport
    """
    return _run("wmc", commands.cmd_wmc, request)


@router.post("/count", response_model=CountReport, responses=_ERROR_RESPONSES, summary="Model count")
async def solve_count(request: SolveRequest) -> CountReport:
    """Quantum counting with exact and classical comparisons."""
    return _run("count", commands.cmd_count, request)


@router.post("/sample", response_model=SampleReport, responses=_ERROR_RESPONSES, summary="Weighted sampling")
async def solve_sample(request: SolveRequest) -> SampleReport:
    """QWCS draws over the query variables."""
    return _run("sample", commands.cmd_sample, request)


@router.post("/mpe", response_model=VoteReport, responses=_ERROR_RESPONSES, summary="Most probable explanation")
async def solve_mpe(request: SolveRequest) -> VoteReport:
    return _run("mpe", commands.cmd_mpe, request)


@router.post("/map", response_model=VoteReport, responses=_ERROR_RESPONSES, summary="MAP state of the query")
async def solve_map(request: SolveRequest) -> VoteReport:
    return _run("map", commands.cmd_map, request)
