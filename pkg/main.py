import logging
import os
from pathlib import Path

import uvicorn
import yaml
from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException

from dao.surface_config import SurfaceConfig, load_config
from models.errors import SurfaceCheckError
from services.cache import ReportCache
from services.runner import run

load_dotenv()

REDIS_HOST = os.getenv("REDIS_HOST", "localhost")
REDIS_PORT = int(os.getenv("REDIS_PORT", 6379))
REDIS_DB = int(os.getenv("REDIS_DB", 0))
REPORT_TTL = int(os.getenv("REPORT_TTL", 3600))
FIXTURES_DIR = Path(os.getenv("FIXTURES_DIR", Path(__file__).parent / "fixtures"))

logging.basicConfig(level=os.getenv("LOG_LEVEL", "INFO").upper())
logger = logging.getLogger(__name__)

app = FastAPI(title="half-lightlike surface checks")
cache_service = ReportCache(host=REDIS_HOST, port=REDIS_PORT, db=REDIS_DB, ttl=REPORT_TTL)


@app.post("/checks")
def submit_checks(config: SurfaceConfig):
    try:
        key = cache_service.key(config)
        cached = cache_service.get_report(key)
        if cached is not None:
            logger.info("serving cached report for '%s'", config.name)
            return cached
        report = run(config)
        cache_service.save_report(key, report)
        return report.model_dump(mode="json", by_alias=True)
    except SurfaceCheckError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@app.get("/fixtures")
async def list_fixtures():
    return {"fixtures": sorted(path.stem for path in FIXTURES_DIR.glob("*.yaml"))}


@app.get("/fixtures/{name}")
async def get_fixture(name: str):
    path = FIXTURES_DIR / f"{name}.yaml"
    if not name.replace("_", "").isalnum() or not path.is_file():
        raise HTTPException(status_code=404, detail=f"unknown fixture '{name}'")
    try:
        config = load_config(path)
        return {"name": name, "config": yaml.safe_load(path.read_text()), "checks": [c.value for c in config.checks.run]}
    except SurfaceCheckError as e:
        raise HTTPException(status_code=422, detail=str(e))


if __name__ == "__main__":
    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
