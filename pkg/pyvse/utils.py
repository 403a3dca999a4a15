import os
import re
from typing import Hashable, Iterable, Optional

from loguru import logger

from .poly import Polynomial, parse_expression
from .types import RecordType

ASSET_FOLDER = os.path.join(os.path.dirname(__file__), "assets")
LINK_SUFFIX = ".vse"


def get_record_type(line: str) -> RecordType:
    stripped = line.strip()
    if stripped == "":
        return RecordType.blank
    elif is_comment_line(stripped):
        return RecordType.comment
    elif stripped == "loop":
        return RecordType.loop
    else:
        return RecordType.crossing


def is_comment_line(line: str) -> bool:
    return line.strip().startswith("#")


def _load_file(filename: str) -> list[str]:
    with open(filename, encoding="utf-8") as f:
        return [line.rstrip("\n").rstrip("\r") for line in f.readlines()]


def find_files_in_folder(folder_path, file_extension=None):
    file_list = []
    for root, dirs, files in os.walk(folder_path):
        for file in files:
            if file_extension is None or file.endswith(file_extension):
                file_list.append(os.path.join(root, file))
    # sort the files alphabetically
    file_list.sort()

    return file_list


def bundled_links() -> dict[str, str]:
    links = find_files_in_folder(os.path.join(ASSET_FOLDER, "links"), LINK_SUFFIX)
    return {os.path.basename(path)[: -len(LINK_SUFFIX)]: path for path in links}


def resolve_link_path(name_or_path: str) -> str:
    # a path wins over a bundled fixture of the same name
    if os.path.exists(name_or_path):
        return name_or_path
    links = bundled_links()
    if name_or_path in links:
        logger.debug(f"Using bundled link {name_or_path}")
        return links[name_or_path]
    logger.error(f"Link file not found: {name_or_path}")
    raise FileNotFoundError(
        f"Link not found: {name_or_path}. Bundled links are {sorted(links)}"
    )


_REFERENCE_HEADER = re.compile(r"^\s*([^:#][^:]*):(.*)$")


def load_reference(name: str) -> dict[str, str]:
    """
    Read a reference transcription from assets/reference/<name>.txt, or from
    the file `name` when it exists.

    Every record starts with a `header: text` line; following lines without a
    header continue the text of the previous record. Lines starting with # are
    comments.
    """
    path = name
    if not os.path.isfile(path):
        path = os.path.join(ASSET_FOLDER, "reference", f"{name}.txt")
    records: dict[str, str] = {}
    current: Optional[str] = None
    for line in _load_file(path):
        if line.strip() == "" or is_comment_line(line):
            continue
        match = _REFERENCE_HEADER.match(line)
        if match:
            current = match.group(1).strip()
            if current in records:
                raise ValueError(f"Duplicate reference record '{current}' in {path}")
            records[current] = match.group(2).strip()
        elif current is None:
            raise ValueError(f"Reference text before the first header in {path}")
        else:
            records[current] = f"{records[current]} {line.strip()}"
    logger.debug(f"Loaded {len(records)} reference records from {path}")
    return records


def load_reference_polynomials(name: str, prefix: str) -> list[Polynomial]:
    """Records `<prefix><n>` of a reference file, parsed and ordered by n."""
    records = load_reference(name)
    keys = sorted(
        (key for key in records if key.startswith(prefix) and key[len(prefix) :].isdigit()),
        key=lambda key: int(key[len(prefix) :]),
    )
    return [parse_expression(records[key]) for key in keys]


class UnionFind:
    def __init__(self, items: Iterable[Hashable] = ()):
        self.parents: dict = {}
        self.sizes: dict = {}
        self.components = 0
        for item in items:
            self.add(item)

    def add(self, item):
        if item not in self.parents:
            self.parents[item] = item
            self.sizes[item] = 1
            self.components += 1

    def find(self, item):
        self.add(item)
        root = item
        while self.parents[root] != root:
            root = self.parents[root]
        while item != root:
            self.parents[item], item = root, self.parents[item]
        return root

    def merge(self, i, j) -> bool:
        i = self.find(i)
        j = self.find(j)
        if i == j:
            return False
        if self.sizes[i] < self.sizes[j]:
            i, j = j, i
        self.parents[j] = i
        self.sizes[i] += self.sizes[j]
        self.components -= 1
        return True
