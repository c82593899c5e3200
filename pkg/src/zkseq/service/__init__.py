"""HTTP service wrapping the library; run with uvicorn zkseq.service.app:app."""
