"""Start the scoring service: python -m mlm_service --model-dir CHECKPOINT."""

import argparse

import uvicorn

from .app import create_app
from .backend import HFMaskedLM


def main(argv=None):
    parser = argparse.ArgumentParser(prog="mlm-service", description=__doc__)
    parser.add_argument("--model-dir", required=True, help="local checkpoint directory or hub name")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8321)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)
    app = create_app(loader=lambda: HFMaskedLM(args.model_dir, device=args.device))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


if __name__ == "__main__":
    main()
