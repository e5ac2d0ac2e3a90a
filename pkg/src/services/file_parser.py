"""
文件格式模块 - 带权图、二层系统、码、码字与仿射码参数的行式文本格式

所有格式都是 UTF-8、逐行、空白分隔；首行是带版本号的头，空行与 `#` 开头的注释行被忽略。
写入采用临时文件 + os.replace 的原子写。
"""
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from src.api.schemas import AffineCodeSpec
from src.core.code import LinearCodeModel
from src.core.graph import WeightedGraph
from src.core.system import TwoLayerSystem
from src.errors import DomainError, ParseError

PathLike = Union[str, Path]
Line = Tuple[int, List[str]]


def render_name(name: Hashable) -> str:
    """元组名写成逗号连接的形式，其余用 str"""
    if isinstance(name, tuple):
        return ",".join(render_name(part) for part in name)
    return str(name)


def _is_token(text: str) -> bool:
    return bool(text) and not any(ch.isspace() for ch in text) and not text.startswith("#")


def _tokens_for(names: Sequence[Hashable], prefix: str) -> Dict[Hashable, str]:
    """名字到文件记号的单射；无法直接书写或发生冲突的名字改为 <prefix><下标>"""
    rendered = [render_name(n) for n in names]
    counts: Dict[str, int] = {}
    for text in rendered:
        counts[text] = counts.get(text, 0) + 1
    tokens: Dict[Hashable, str] = {}
    used = set()
    for i, (name, text) in enumerate(zip(names, rendered)):
        if not _is_token(text) or counts[text] > 1:
            text = f"{prefix}{i}"
            while text in used or counts.get(text):
                text = f"_{text}"
        tokens[name] = text
        used.add(text)
    return tokens


def _fraction_text(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class FileParser:
    """读写 HDE 的文本格式"""

    # ------------------------------------------------------------------
    # 通用
    # ------------------------------------------------------------------

    @staticmethod
    def read_lines(path: PathLike) -> Tuple[str, List[Line]]:
        """
        读取文件，返回头行与其余非空、非注释行（带 1 起的行号）

        Raises:
            ParseError: 文件不存在或为空
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ParseError(f"cannot read file: {e}", path=str(path)) from e
        header: Optional[str] = None
        lines: List[Line] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped:
                continue
            if header is None:
                header = stripped
                continue
            if stripped.startswith("#"):
                continue
            lines.append((number, stripped.split()))
        if header is None:
            raise ParseError("file is empty", path=str(path), line=1)
        return header, lines

    @staticmethod
    def parse_header(header: str, magic: str, path: PathLike) -> Dict[str, str]:
        """校验 `<magic> v1 key=value ...` 形式的头行，返回键值"""
        parts = header.split()
        if len(parts) < 2 or parts[0] != magic or parts[1] != "v1":
            raise ParseError(f"expected header '{magic} v1', got {header!r}", path=str(path), line=1)
        params: Dict[str, str] = {}
        for part in parts[2:]:
            key, sep, value = part.partition("=")
            if not sep or not key or not value:
                raise ParseError(f"malformed header parameter {part!r}", path=str(path), line=1)
            params[key] = value
        return params

    @staticmethod
    def parse_rational(text: str, path: PathLike, line: int) -> Fraction:
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational number: {text!r}", path=str(path), line=line) from None
        return value

    @staticmethod
    def parse_int(text: str, path: PathLike, line: int, what: str = "integer") -> int:
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"{what} expected, got {text!r}", path=str(path), line=line) from None

    @staticmethod
    def write_text(text: str, path: Optional[PathLike] = None) -> None:
        """原子写入文件；path 为 None 或 "-" 时写到 stdout"""
        if path is None or str(path) == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logger.debug(f"Wrote {path}")

    # ------------------------------------------------------------------
    # 带权图 #wgraph v1
    # ------------------------------------------------------------------

    def read_graph(self, path: PathLike) -> WeightedGraph:
        header, lines = self.read_lines(path)
        self.parse_header(header, "#wgraph", path)
        vertices: List[str] = []
        seen = set()
        edges: List[Tuple[str, str, Fraction]] = []
        edge_keys = set()
        for number, parts in lines:
            kind = parts[0]
            if kind == "vertex":
                if len(parts) != 2:
                    raise ParseError("vertex line needs exactly one name", path=str(path), line=number)
                if parts[1] in seen:
                    raise ParseError(f"duplicate vertex {parts[1]!r}", path=str(path), line=number)
                seen.add(parts[1])
                vertices.append(parts[1])
            elif kind == "edge":
                if len(parts) != 4:
                    raise ParseError("edge line needs two names and a weight", path=str(path), line=number)
                a, b = parts[1], parts[2]
                for name in (a, b):
                    if name not in seen:
                        raise ParseError(f"edge uses undeclared vertex {name!r}", path=str(path), line=number)
                key = frozenset((a, b))
                if key in edge_keys:
                    raise ParseError(f"duplicate edge {a}-{b}", path=str(path), line=number)
                edge_keys.add(key)
                edges.append((a, b, self.parse_rational(parts[3], path, number)))
            else:
                raise ParseError(f"unknown record {kind!r}", path=str(path), line=number)
        try:
            graph = WeightedGraph(vertices, edges)
        except DomainError as e:
            raise ParseError(str(e), path=str(path)) from e
        logger.info(f"Loaded graph {path}: {len(graph.vertices)} vertices, {len(graph.edge_weight)} edges")
        return graph

    @staticmethod
    def render_graph(g: WeightedGraph) -> str:
        tokens = _tokens_for(g.vertices, "n")
        out = ["#wgraph v1"]
        out += [f"vertex {tokens[v]}" for v in g.vertices]
        out += [f"edge {tokens[u]} {tokens[v]} {_fraction_text(w)}" for u, v, w in g.edges()]
        return "\n".join(out) + "\n"

    def write_graph(self, g: WeightedGraph, path: Optional[PathLike] = None) -> None:
        self.write_text(self.render_graph(g), path)

    # ------------------------------------------------------------------
    # 二层系统 #tls v1
    # ------------------------------------------------------------------

    def read_system(self, path: PathLike) -> TwoLayerSystem:
        """
        读取二层系统

        top 行的第一个记号含 `/` 时视为权重，否则整行都是 ename、权重取 1。
        头行可带 s= / k= / K= 声明参数。
        """
        header, lines = self.read_lines(path)
        params = self.parse_header(header, "#tls", path)
        declared = {key: self.parse_int(params[key], path, 1, key) for key in ("s", "k", "K") if key in params}
        vertices: List[str] = []
        seen = set()
        edges: Dict[str, List[str]] = {}
        tops: List[Tuple[List[str], Fraction]] = []
        for number, parts in lines:
            kind = parts[0]
            if kind == "vertex":
                if len(parts) != 2:
                    raise ParseError("vertex line needs exactly one name", path=str(path), line=number)
                if parts[1] in seen:
                    raise ParseError(f"duplicate vertex {parts[1]!r}", path=str(path), line=number)
                seen.add(parts[1])
                vertices.append(parts[1])
            elif kind == "edge":
                if len(parts) < 3:
                    raise ParseError("edge line needs a name and its vertices", path=str(path), line=number)
                name, members = parts[1], parts[2:]
                if name in edges:
                    raise ParseError(f"duplicate edge name {name!r}", path=str(path), line=number)
                unknown = [v for v in members if v not in seen]
                if unknown:
                    raise ParseError(f"edge {name!r} uses undeclared vertex {unknown[0]!r}", path=str(path), line=number)
                if len(set(members)) != len(members):
                    raise ParseError(f"edge {name!r} repeats a vertex", path=str(path), line=number)
                edges[name] = members
            elif kind == "top":
                rest = parts[1:]
                weight = Fraction(1)
                if rest and "/" in rest[0]:
                    weight = self.parse_rational(rest[0], path, number)
                    rest = rest[1:]
                if not rest:
                    raise ParseError("top line lists no edges", path=str(path), line=number)
                unknown = [e for e in rest if e not in edges]
                if unknown:
                    raise ParseError(f"top uses undeclared edge {unknown[0]!r}", path=str(path), line=number)
                if len(set(rest)) != len(rest):
                    raise ParseError("top repeats an edge", path=str(path), line=number)
                if weight <= 0:
                    raise ParseError(f"top weight {weight} is not positive", path=str(path), line=number)
                tops.append((rest, weight))
            else:
                raise ParseError(f"unknown record {kind!r}", path=str(path), line=number)
        system = TwoLayerSystem(vertices, edges, tops, **declared)
        logger.info(f"Loaded system {path}: {system!r}")
        return system

    @staticmethod
    def system_tokens(x: TwoLayerSystem) -> Tuple[Dict[Hashable, str], Dict[Hashable, str]]:
        """(顶点记号, 边记号)；码文件与系统文件共用同一套记号"""
        return _tokens_for(x.vertices, "v"), _tokens_for(x.edge_names, "e")

    def render_system(self, x: TwoLayerSystem) -> str:
        vt, et = self.system_tokens(x)
        head = "#tls v1"
        if x.declared_s is not None:
            head += f" s={x.declared_s}"
        if x.declared_k is not None:
            head += f" k={x.declared_k}"
        if x.declared_K is not None:
            head += f" K={x.declared_K}"
        out = [head]
        out += [f"vertex {vt[v]}" for v in x.vertices]
        out += [f"edge {et[e]} " + " ".join(vt[v] for v in x.sorted_support(e)) for e in x.edge_names]
        for j, w in enumerate(x.top_weight):
            out.append(f"top {_fraction_text(w)} " + " ".join(et[e] for e in x.ordered_top(j)))
        return "\n".join(out) + "\n"

    def write_system(self, x: TwoLayerSystem, path: Optional[PathLike] = None) -> None:
        self.write_text(self.render_system(x), path)

    # ------------------------------------------------------------------
    # 码 #code v1
    # ------------------------------------------------------------------

    def read_code(self, path: PathLike, system_path: Optional[PathLike] = None) -> LinearCodeModel:
        """
        读取码文件；system= 是相对码文件所在目录的路径，system_path 可覆盖它

        Raises:
            ParseError: 格式错误或引用了系统中不存在的名字
        """
        path = Path(path)
        header, lines = self.read_lines(path)
        params = self.parse_header(header, "#code", path)
        if "p" not in params:
            raise ParseError("header lacks p=<prime>", path=str(path), line=1)
        p = self.parse_int(params["p"], path, 1, "p")
        if system_path is None:
            if "system" not in params:
                raise ParseError("header lacks system=<path>", path=str(path), line=1)
            system_path = path.parent / params["system"]
        x = self.read_system(system_path)

        rows: Dict[str, Dict[str, int]] = {}
        deps: List[Dict[str, int]] = []
        for number, parts in lines:
            kind = parts[0]
            if kind == "row":
                if len(parts) < 2:
                    raise ParseError("row line needs an edge name", path=str(path), line=number)
                name = parts[1]
                if name not in x.edge_index:
                    raise ParseError(f"row names unknown edge {name!r}", path=str(path), line=number)
                if name in rows:
                    raise ParseError(f"duplicate row {name!r}", path=str(path), line=number)
                support = x.sorted_support(name)
                coeffs = parts[2:]
                if len(coeffs) != len(support):
                    raise ParseError(f"row {name!r} needs {len(support)} coefficients, got {len(coeffs)}",
                                     path=str(path), line=number)
                rows[name] = {v: self.parse_int(a, path, number, "coefficient") for v, a in zip(support, coeffs)}
            elif kind == "dep":
                ld: Dict[str, int] = {}
                for item in parts[1:]:
                    name, sep, value = item.rpartition(":")
                    if not sep or not name:
                        raise ParseError(f"dependency entry {item!r} is not <ename>:<coeff>", path=str(path), line=number)
                    if name not in rows:
                        raise ParseError(f"dependency uses unknown row {name!r}", path=str(path), line=number)
                    ld[name] = self.parse_int(value, path, number, "coefficient")
                if not ld:
                    raise ParseError("dependency line is empty", path=str(path), line=number)
                deps.append(ld)
            else:
                raise ParseError(f"unknown record {kind!r}", path=str(path), line=number)
        try:
            code = LinearCodeModel(x, p, rows, deps)
        except DomainError as e:
            raise ParseError(str(e), path=str(path)) from e
        logger.info(f"Loaded code {path}: {code!r}")
        return code

    def render_code(self, code: LinearCodeModel, system_ref: str) -> str:
        x = code.system
        vt, et = self.system_tokens(x)
        out = [f"#code v1 p={code.p} system={system_ref}"]
        for name in code.row_names:
            coeffs = code.rows[name]
            out.append(f"row {et[name]} " + " ".join(str(coeffs.get(v, 0)) for v in x.sorted_support(name)))
        for ld in code.dependencies:
            items = sorted(ld.items(), key=lambda item: code.row_index[item[0]])
            out.append("dep " + " ".join(f"{et[name]}:{a}" for name, a in items))
        return "\n".join(out) + "\n"

    def write_code(self, code: LinearCodeModel, path: PathLike, system_path: PathLike) -> None:
        """写码文件，system= 记录系统文件相对码文件目录的路径"""
        ref = os.path.relpath(Path(system_path).resolve(), Path(path).resolve().parent)
        if any(ch.isspace() for ch in ref):
            raise DomainError(f"system path {ref!r} contains whitespace")
        self.write_text(self.render_code(code, ref), path)

    # ------------------------------------------------------------------
    # 码字 word
    # ------------------------------------------------------------------

    def read_word(self, path: PathLike, code: LinearCodeModel) -> Dict[Hashable, int]:
        """`word v=val ...`（可分多行），每个坐标恰好出现一次"""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ParseError(f"cannot read file: {e}", path=str(path)) from e
        known = set(code.vertices)
        word: Dict[Hashable, int] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] != "word":
                raise ParseError(f"unknown record {parts[0]!r}", path=str(path), line=number)
            for item in parts[1:]:
                name, sep, value = item.rpartition("=")
                if not sep or not name:
                    raise ParseError(f"word entry {item!r} is not <vertex>=<value>", path=str(path), line=number)
                if name not in known:
                    raise ParseError(f"unknown vertex {name!r}", path=str(path), line=number)
                if name in word:
                    raise ParseError(f"vertex {name!r} assigned twice", path=str(path), line=number)
                symbol = self.parse_int(value, path, number, "symbol")
                if not 0 <= symbol < code.p:
                    raise ParseError(f"symbol {symbol} outside F_{code.p}", path=str(path), line=number)
                word[name] = symbol
        missing = [v for v in code.vertices if v not in word]
        if missing:
            raise ParseError(f"word is missing coordinate {missing[0]!r}", path=str(path))
        return word

    def render_word(self, code: LinearCodeModel, c: Iterable[int]) -> str:
        vt, _ = self.system_tokens(code.system)
        values = list(c)
        return "word " + " ".join(f"{vt[v]}={int(a)}" for v, a in zip(code.vertices, values)) + "\n"

    # ------------------------------------------------------------------
    # 仿射码参数 #affine v1
    # ------------------------------------------------------------------

    def read_affine_spec(self, path: PathLike) -> AffineCodeSpec:
        """`#affine v1 q=<prime> n=<int> p=<prime>` 后接一行 `tau <v1> <v2> ...`，向量写作逗号分隔的数字"""
        header, lines = self.read_lines(path)
        params = self.parse_header(header, "#affine", path)
        for key in ("q", "n", "p"):
            if key not in params:
                raise ParseError(f"header lacks {key}=", path=str(path), line=1)
        q, n, p = (self.parse_int(params[key], path, 1, key) for key in ("q", "n", "p"))
        tau: Optional[List[Tuple[int, ...]]] = None
        tau_line = 1
        for number, parts in lines:
            if parts[0] != "tau":
                raise ParseError(f"unknown record {parts[0]!r}", path=str(path), line=number)
            if tau is not None:
                raise ParseError("tau given twice", path=str(path), line=number)
            tau_line = number
            tau = [tuple(self.parse_int(d, path, number, "digit") for d in vec.split(",")) for vec in parts[1:]]
        if tau is None:
            raise ParseError("missing tau line", path=str(path))
        try:
            spec = AffineCodeSpec(q=q, n=n, p=p, tau0=tuple(tau))
        except ValidationError as e:
            raise ParseError(e.errors()[0]["msg"], path=str(path), line=tau_line) from e
        logger.info(f"Loaded affine spec {path}: q={q}, n={n}, p={p}, k={spec.k}")
        return spec

    @staticmethod
    def render_affine_spec(spec: AffineCodeSpec) -> str:
        vectors = " ".join(",".join(str(d) for d in vec) for vec in spec.tau0)
        return f"#affine v1 q={spec.q} n={spec.n} p={spec.p}\ntau {vectors}\n"


# 全局解析器实例
file_parser = FileParser()
