# Package marker so the tests can import from src.hkepler
