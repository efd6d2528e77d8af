# glue_server.py
import sys, os, json, logging
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from routers.space_router import router as space_router
from routers.glue_router import router as glue_router
from routers.ends_router import router as ends_router
from routers.coarse_router import router as coarse_router
from routers.laws_router import router as laws_router

# ---- Logging: JSON lines ----
logging.basicConfig(
    stream=sys.stdout,
    level=os.getenv("LOG_LEVEL", "INFO").upper(),
    format="%(message)s",
)
logging.getLogger("uvicorn.access").setLevel(logging.WARNING)

app = FastAPI(title="glueing engine")

# ---- CORS ----
ALLOWED_ORIGINS = [o.strip() for o in os.getenv("GLUE_ALLOWED_ORIGINS", "").split(",") if o.strip()]

app.add_middleware(
  CORSMiddleware,
  allow_origins=ALLOWED_ORIGINS,
  allow_credentials=False,
  allow_methods=["POST", "OPTIONS", "GET"],
  allow_headers=["*"],
)


@app.get("/health")
def health():
    return {"ok": True}


@app.on_event("startup")
async def startup():
    logging.info(json.dumps({"event": "server.startup", "origins": len(ALLOWED_ORIGINS),
                             "token_guard": bool(os.getenv("GLUE_TOKEN", ""))}))


@app.get("/")
def root():
    return {"message": "Glueing engine API is running!"}

# ---- Routers ----
app.include_router(space_router)
app.include_router(glue_router)
app.include_router(ends_router)
app.include_router(coarse_router)
app.include_router(laws_router)
