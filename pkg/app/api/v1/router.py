from fastapi import APIRouter
from app.modules.arff.routes import router as arff_router
from app.modules.experiment.routes import router as experiment_router
from app.modules.harness.routes import router as harness_router

api_router = APIRouter()

api_router.include_router(
    arff_router,
    prefix="/arff",
    tags=["ARFF Example Sets"]
)

api_router.include_router(
    experiment_router,
    prefix="/experiments",
    tags=["Experiments"]
)

api_router.include_router(
    harness_router,
    prefix="/trend-studies",
    tags=["Unexpected Outlier Trend Studies"]
)
