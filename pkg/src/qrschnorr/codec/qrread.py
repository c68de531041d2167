"""Reading QR Model 2 symbols from a module matrix.

Covers versions 1-40, all four error-correction levels, Reed-Solomon
correction, and numeric / alphanumeric / byte / ECI segments.  It is used
on matrices directly and as a fallback for clean, axis-aligned renders
that a camera-oriented decoder refuses (such as the empty-payload symbol).
"""

from __future__ import annotations

import numpy as np

from ..errors import QrDecodeError

# indexed [level][version]; index 0 unused
ECC_CODEWORDS_PER_BLOCK = {
    "L": (-1, 7, 10, 15, 20, 26, 18, 20, 24, 30, 18, 20, 24, 26, 30, 22, 24, 28, 30, 28, 28,
          28, 28, 30, 30, 26, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30),
    "M": (-1, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26, 30, 22, 22, 24, 24, 28, 28, 26, 26, 26,
          26, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28),
    "Q": (-1, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24, 28, 26, 24, 20, 30, 24, 28, 28, 26, 30,
          28, 30, 30, 30, 30, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30),
    "H": (-1, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28, 24, 28, 22, 24, 24, 30, 28, 28, 26, 28,
          30, 24, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30),
}
NUM_BLOCKS = {
    "L": (-1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4, 4, 6, 6, 6, 6, 7, 8,
          8, 9, 9, 10, 12, 12, 12, 13, 14, 15, 16, 17, 18, 19, 19, 20, 21, 22, 24, 25),
    "M": (-1, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5, 5, 8, 9, 9, 10, 10, 11, 13, 14, 16,
          17, 17, 18, 20, 21, 23, 25, 26, 28, 29, 31, 33, 35, 37, 38, 40, 43, 45, 47, 49),
    "Q": (-1, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8, 8, 10, 12, 16, 12, 17, 16, 18, 21, 20,
          23, 23, 25, 27, 29, 34, 34, 35, 38, 40, 43, 45, 48, 51, 53, 56, 59, 62, 65, 68),
    "H": (-1, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8, 11, 11, 16, 16, 18, 16, 19, 21, 25, 25,
          25, 34, 30, 32, 35, 37, 40, 42, 45, 48, 51, 54, 57, 60, 63, 66, 70, 74, 77, 81),
}
# two-bit level field inside the format information
FORMAT_LEVEL_BITS = {"L": 1, "M": 0, "Q": 3, "H": 2}
_LEVEL_FROM_BITS = {v: k for k, v in FORMAT_LEVEL_BITS.items()}
ALPHANUMERIC = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:"


# --- GF(256), primitive polynomial x^8 + x^4 + x^3 + x^2 + 1 ---------------

_EXP = [0] * 512
_LOG = [0] * 256
_v = 1
for _i in range(255):
    _EXP[_i] = _v
    _LOG[_v] = _i
    _v <<= 1
    if _v & 0x100:
        _v ^= 0x11D
for _i in range(255, 512):
    _EXP[_i] = _EXP[_i - 255]
del _v, _i


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return _EXP[(_LOG[a] - _LOG[b]) % 255]


def gf_pow_alpha(e: int) -> int:
    return _EXP[e % 255]


def _poly_eval_low(coeffs, x):
    """Evaluate a polynomial given lowest-degree coefficient first."""
    y = 0
    for c in reversed(coeffs):
        y = gf_mul(y, x) ^ c
    return y


def rs_syndromes(block, n_ecc: int) -> list[int]:
    """Syndromes of a codeword whose first symbol is the highest-degree coefficient."""
    out = []
    for j in range(n_ecc):
        x = gf_pow_alpha(j)
        acc = 0
        for c in block:
            acc = gf_mul(acc, x) ^ c
        out.append(acc)
    return out


def rs_correct(block, n_ecc: int) -> list[int]:
    """Correct up to ``n_ecc // 2`` symbol errors in place of a copy; raise if impossible."""
    block = list(block)
    synd = rs_syndromes(block, n_ecc)
    if not any(synd):
        return block

    # Berlekamp-Massey: error locator, lowest degree first
    locator, prev = [1], [1]
    errors, shift, prev_disc = 0, 1, 1
    for k in range(n_ecc):
        disc = synd[k]
        for i in range(1, errors + 1):
            if i < len(locator):
                disc ^= gf_mul(locator[i], synd[k - i])
        if disc == 0:
            shift += 1
            continue
        coef = gf_div(disc, prev_disc)
        update = [0] * shift + [gf_mul(coef, b) for b in prev]
        new = [
            (locator[i] if i < len(locator) else 0) ^ (update[i] if i < len(update) else 0)
            for i in range(max(len(locator), len(update)))
        ]
        if 2 * errors <= k:
            prev, prev_disc = locator, disc
            errors = k + 1 - errors
            shift = 1
        else:
            shift += 1
        locator = new
    while len(locator) > 1 and locator[-1] == 0:
        locator.pop()
    if errors != len(locator) - 1 or 2 * errors > n_ecc:
        raise QrDecodeError("too many errors in Reed-Solomon block")

    n = len(block)
    positions = [pos for pos in range(n) if _poly_eval_low(locator, gf_pow_alpha(-pos)) == 0]
    if len(positions) != errors:
        raise QrDecodeError("error locator roots do not match error count")

    # Forney, first consecutive root alpha^0
    omega = [0] * n_ecc
    for i, s in enumerate(synd):
        for j, l in enumerate(locator):
            if i + j < n_ecc:
                omega[i + j] ^= gf_mul(s, l)
    deriv = [locator[i] if i % 2 == 1 else 0 for i in range(1, len(locator))]
    for pos in positions:
        x = gf_pow_alpha(pos)
        x_inv = gf_pow_alpha(-pos)
        denom = _poly_eval_low(deriv, x_inv)
        if denom == 0:
            raise QrDecodeError("uncorrectable Reed-Solomon block")
        magnitude = gf_mul(x, gf_div(_poly_eval_low(omega, x_inv), denom))
        block[n - 1 - pos] ^= magnitude

    if any(rs_syndromes(block, n_ecc)):
        raise QrDecodeError("Reed-Solomon correction failed")
    return block


# --- symbol geometry ---------------------------------------------------------

def symbol_size(version: int) -> int:
    return 17 + 4 * version


def alignment_positions(version: int) -> list[int]:
    if version == 1:
        return []
    count = version // 7 + 2
    step = 26 if version == 32 else (version * 4 + count * 2 + 1) // (count * 2 - 2) * 2
    size = symbol_size(version)
    return [6] + sorted(size - 7 - i * step for i in range(count - 1))


def raw_data_modules(version: int) -> int:
    result = (16 * version + 128) * version + 64
    if version >= 2:
        n = version // 7 + 2
        result -= (25 * n - 10) * n - 55
        if version >= 7:
            result -= 36
    return result


def total_codewords(version: int) -> int:
    return raw_data_modules(version) // 8


def data_codewords(version: int, level: str) -> int:
    return total_codewords(version) - ECC_CODEWORDS_PER_BLOCK[level][version] * NUM_BLOCKS[level][version]


def byte_mode_capacity(version: int, level: str) -> int:
    """Largest byte-mode payload (single segment, no ECI) fitting the symbol."""
    count_bits = 8 if version <= 9 else 16
    return (data_codewords(version, level) * 8 - 4 - count_bits) // 8


def function_mask(version: int) -> np.ndarray:
    """True where a module belongs to a function pattern rather than data."""
    size = symbol_size(version)
    mask = np.zeros((size, size), dtype=bool)
    mask[6, :] = True
    mask[:, 6] = True
    # finders, separators, format areas and the dark module
    mask[:9, :9] = True
    mask[:9, size - 8:] = True
    mask[size - 8:, :9] = True
    pos = alignment_positions(version)
    last = len(pos) - 1
    for i, row in enumerate(pos):
        for j, col in enumerate(pos):
            if (i, j) in ((0, 0), (0, last), (last, 0)):
                continue
            mask[row - 2:row + 3, col - 2:col + 3] = True
    if version >= 7:
        mask[:6, size - 11:size - 8] = True
        mask[size - 11:size - 8, :6] = True
    return mask


def _format_code(level: str, mask_id: int) -> int:
    data = FORMAT_LEVEL_BITS[level] << 3 | mask_id
    rem = data
    for _ in range(10):
        rem = (rem << 1) ^ ((rem >> 9) * 0x537)
    return (data << 10 | rem) ^ 0x5412


FORMAT_CODES = {
    _format_code(level, m): (level, m) for level in "LMQH" for m in range(8)
}


def _read_format(m: np.ndarray) -> tuple[str, int]:
    size = m.shape[0]
    first = [(i, 8) for i in range(6)] + [(7, 8), (8, 8), (8, 7)] + [(8, 14 - i) for i in range(9, 15)]
    second = [(8, size - 1 - i) for i in range(8)] + [(size - 15 + i, 8) for i in range(8, 15)]
    best = None
    for coords in (first, second):
        word = sum(int(m[r, c]) << i for i, (r, c) in enumerate(coords))
        for code, info in FORMAT_CODES.items():
            dist = bin(code ^ word).count("1")
            if best is None or dist < best[0]:
                best = (dist, info)
    if best[0] > 3:
        raise QrDecodeError("format information unreadable")
    return best[1]


_MASKS = (
    lambda r, c: (r + c) % 2 == 0,
    lambda r, c: r % 2 == 0,
    lambda r, c: c % 3 == 0,
    lambda r, c: (r + c) % 3 == 0,
    lambda r, c: (r // 2 + c // 3) % 2 == 0,
    lambda r, c: (r * c) % 2 + (r * c) % 3 == 0,
    lambda r, c: ((r * c) % 2 + (r * c) % 3) % 2 == 0,
    lambda r, c: ((r + c) % 2 + (r * c) % 3) % 2 == 0,
)


def _read_codewords(m: np.ndarray, version: int, mask_id: int) -> list[int]:
    size = m.shape[0]
    func = function_mask(version)
    rows, cols = np.indices((size, size))
    flip = _MASKS[mask_id](rows, cols)
    data = m ^ flip
    bits = []
    right = size - 1
    while right >= 1:
        if right == 6:
            right = 5
        upward = ((right + 1) & 2) == 0
        for vert in range(size):
            r = size - 1 - vert if upward else vert
            for c in (right, right - 1):
                if not func[r, c]:
                    bits.append(int(data[r, c]))
        right -= 2
    n = total_codewords(version)
    out = []
    for i in range(n):
        byte = 0
        for b in bits[8 * i:8 * i + 8]:
            byte = byte << 1 | b
        out.append(byte)
    return out


def _deinterleave(codewords: list[int], version: int, level: str) -> list[int]:
    n_blocks = NUM_BLOCKS[level][version]
    n_ecc = ECC_CODEWORDS_PER_BLOCK[level][version]
    raw = total_codewords(version)
    n_short = n_blocks - raw % n_blocks
    short_len = raw // n_blocks
    blocks = [[None] * (short_len + 1) for _ in range(n_blocks)]
    it = iter(codewords)
    for i in range(short_len + 1):
        for j in range(n_blocks):
            if i != short_len - n_ecc or j >= n_short:
                blocks[j][i] = next(it)
    data = []
    for j, blk in enumerate(blocks):
        if j < n_short:
            del blk[short_len - n_ecc]
        fixed = rs_correct(blk, n_ecc)
        data.extend(fixed[:-n_ecc])
    return data


class _BitReader:
    def __init__(self, data: list[int]):
        self.bits = "".join(format(b, "08b") for b in data)
        self.pos = 0

    def remaining(self) -> int:
        return len(self.bits) - self.pos

    def read(self, n: int) -> int:
        if n > self.remaining():
            raise QrDecodeError("bit stream ended inside a segment")
        value = int(self.bits[self.pos:self.pos + n] or "0", 2)
        self.pos += n
        return value


def _count_bits(mode: int, version: int) -> int:
    tier = 0 if version <= 9 else 1 if version <= 26 else 2
    return {1: (10, 12, 14), 2: (9, 11, 13), 4: (8, 16, 16)}[mode][tier]


def _parse_segments(data: list[int], version: int) -> bytes:
    reader = _BitReader(data)
    out = bytearray()
    while reader.remaining() >= 4:
        mode = reader.read(4)
        if mode == 0:
            break
        if mode == 4:
            n = reader.read(_count_bits(4, version))
            out.extend(reader.read(8) for _ in range(n))
        elif mode == 1:
            n = reader.read(_count_bits(1, version))
            digits = []
            while n >= 3:
                digits.append(f"{reader.read(10):03d}")
                n -= 3
            if n == 2:
                digits.append(f"{reader.read(7):02d}")
            elif n == 1:
                digits.append(str(reader.read(4)))
            out.extend("".join(digits).encode("ascii"))
        elif mode == 2:
            n = reader.read(_count_bits(2, version))
            chars = []
            while n >= 2:
                v = reader.read(11)
                chars += [ALPHANUMERIC[v // 45], ALPHANUMERIC[v % 45]]
                n -= 2
            if n:
                chars.append(ALPHANUMERIC[reader.read(6)])
            out.extend("".join(chars).encode("ascii"))
        elif mode == 7:
            first = reader.read(8)
            if first & 0x80:
                reader.read(16 if first & 0x40 else 8)
        else:
            raise QrDecodeError(f"unsupported segment mode {mode:04b}")
    return bytes(out)


def read_matrix(modules) -> bytes:
    """Decode a square boolean module matrix (True = dark, no quiet zone)."""
    m = np.asarray(modules, dtype=bool)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise QrDecodeError("module matrix must be square")
    size = m.shape[0]
    version, rest = divmod(size - 17, 4)
    if rest or not 1 <= version <= 40:
        raise QrDecodeError(f"{size}x{size} is not a QR symbol size")
    level, mask_id = _read_format(m)
    codewords = _read_codewords(m, version, mask_id)
    data = _deinterleave(codewords, version, level)
    return _parse_segments(data, version)


def read_format(modules) -> tuple[str, int]:
    """Error-correction level and mask pattern of a module matrix."""
    return _read_format(np.asarray(modules, dtype=bool))


def sample_grid(gray: np.ndarray) -> np.ndarray:
    """Recover the module matrix from a clean, upright, unrotated render.

    The module pitch comes from the top-left finder pattern, whose top row
    is seven dark modules wide.
    """
    gray = np.asarray(gray, dtype=float)
    if gray.ndim != 2 or gray.size == 0:
        raise QrDecodeError("expected a 2-D grayscale image")
    lo, hi = gray.min(), gray.max()
    if hi - lo < 32:
        raise QrDecodeError("image has no contrast")
    dark = gray < (lo + hi) / 2
    rows = np.flatnonzero(dark.any(axis=1))
    cols = np.flatnonzero(dark.any(axis=0))
    top, bottom, left, right = rows[0], rows[-1], cols[0], cols[-1]
    run = 0
    while left + run <= right and dark[top, left + run]:
        run += 1
    pitch = run / 7
    if pitch < 1:
        raise QrDecodeError("no finder pattern found")
    width = (right - left + 1) / pitch
    height = (bottom - top + 1) / pitch
    version = round((width - 17) / 4)
    size = symbol_size(version) if version >= 1 else 0
    if not 1 <= version <= 40 or abs(width - size) > 0.5 or abs(height - size) > 0.5:
        raise QrDecodeError("dark region is not a square QR symbol")
    centers = (np.arange(size) + 0.5) * pitch
    ri = np.clip((top + centers).astype(int), 0, dark.shape[0] - 1)
    ci = np.clip((left + centers).astype(int), 0, dark.shape[1] - 1)
    return dark[np.ix_(ri, ci)]
