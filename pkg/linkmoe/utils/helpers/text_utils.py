def parse_csv_list(text: str | None) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_int_list(text: str | None) -> list[int]:
    return [int(t) for t in parse_csv_list(text)]
