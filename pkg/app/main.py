"""
FastAPI Application Entry Point
Initializes the FastAPI app and includes the solve router.
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from app.api.solve import router as solve_router
from app.config import settings

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Lifespan event handler for startup and shutdown.
    """
    logger.info(
        f"Starting QWMC simulator API (seed {settings.SEED}, backend {settings.POWER_BACKEND}, "
        f"max qubits {settings.MAX_QUBITS})"
    )
    yield  # App runs here
    logger.info("Shutting down QWMC simulator API...")


# Create FastAPI app
app = FastAPI(
    title="QWMC Simulator API",
    description="""
## Quantum Weighted Model Counting and Sampling

Deterministic, seedable state-vector simulation of:
- **QWMC**: phase estimation of the weighted Grover operator
- **QWCS**: weighted constrained sampling over query variables
- **MPE / MAP**: repeat-and-vote over QWCS draws
- Exact and classical Monte-Carlo baselines with oracle query counts

### Endpoints:
- `POST /wmc`, `/count`, `/sample`, `/mpe`, `/map` - run a method on weighted DIMACS text
- `GET /health` - Health check for monitoring
    """,
    version="1.0.0",
    lifespan=lifespan
)

# Include API routers
app.include_router(solve_router, tags=["Solve"])


@app.get("/health", tags=["Health"])
async def health_check():
    """
    Health check endpoint.

    Returns:
        dict: Status indicator
    """
    return {"status": "healthy"}


@app.get("/", tags=["Root"])
async def root():
    return {
        "message": "QWMC Simulator API",
        "docs": "/docs",
        "health": "/health",
        "solve": ["POST /wmc", "POST /count", "POST /sample", "POST /mpe", "POST /map"],
    }
