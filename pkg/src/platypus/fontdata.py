"""Embedded 12-row bitmap glyphs for printable ASCII (0x20-0x7E).

Each entry is (advance_width, 12 row bitmasks, LSB = leftmost column).
Frozen data: rendering must stay pixel-identical across platforms.
"""

GLYPH_HEIGHT = 12
GLYPH_BASELINE = 10

GLYPHS = {
    ' ': (3, (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000)),
    '!': (2, (0x000, 0x000, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x000, 0x002, 0x000, 0x000)),
    '"': (3, (0x000, 0x000, 0x006, 0x006, 0x006, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000)),
    '#': (5, (0x000, 0x000, 0x014, 0x014, 0x004, 0x01e, 0x00c, 0x01e, 0x00a, 0x002, 0x000, 0x000)),
    '$': (6, (0x000, 0x008, 0x01c, 0x03e, 0x02a, 0x00e, 0x01c, 0x028, 0x02a, 0x01c, 0x008, 0x000)),
    '%': (7, (0x000, 0x000, 0x027, 0x035, 0x015, 0x00a, 0x028, 0x054, 0x056, 0x072, 0x000, 0x000)),
    '&': (7, (0x000, 0x000, 0x01c, 0x002, 0x022, 0x07c, 0x026, 0x022, 0x022, 0x03c, 0x000, 0x000)),
    "'": (2, (0x000, 0x000, 0x001, 0x001, 0x001, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000)),
    '(': (3, (0x000, 0x000, 0x004, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x004, 0x004, 0x000)),
    ')': (2, (0x000, 0x000, 0x001, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x001, 0x001, 0x000)),
    '*': (5, (0x000, 0x000, 0x000, 0x000, 0x000, 0x008, 0x008, 0x01c, 0x014, 0x000, 0x000, 0x000)),
    '+': (6, (0x000, 0x000, 0x000, 0x000, 0x008, 0x008, 0x03e, 0x008, 0x008, 0x000, 0x000, 0x000)),
    ',': (2, (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x001, 0x000, 0x000)),
    '-': (2, (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x003, 0x000, 0x000, 0x000, 0x000, 0x000)),
    '.': (2, (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x001, 0x000, 0x000)),
    '/': (3, (0x000, 0x000, 0x004, 0x004, 0x000, 0x002, 0x002, 0x002, 0x001, 0x001, 0x000, 0x000)),
    '0': (5, (0x000, 0x000, 0x00e, 0x01b, 0x011, 0x011, 0x011, 0x011, 0x01b, 0x00e, 0x000, 0x000)),
    '1': (4, (0x000, 0x000, 0x00c, 0x00e, 0x008, 0x008, 0x008, 0x008, 0x008, 0x008, 0x000, 0x000)),
    '2': (5, (0x000, 0x000, 0x00e, 0x012, 0x010, 0x010, 0x008, 0x004, 0x002, 0x01f, 0x000, 0x000)),
    '3': (5, (0x000, 0x000, 0x00e, 0x013, 0x010, 0x00c, 0x010, 0x011, 0x011, 0x00e, 0x000, 0x000)),
    '4': (6, (0x000, 0x000, 0x010, 0x018, 0x014, 0x014, 0x012, 0x03e, 0x010, 0x010, 0x000, 0x000)),
    '5': (5, (0x000, 0x000, 0x01e, 0x002, 0x001, 0x00f, 0x013, 0x010, 0x011, 0x00e, 0x000, 0x000)),
    '6': (5, (0x000, 0x000, 0x00e, 0x013, 0x011, 0x00f, 0x011, 0x011, 0x011, 0x00e, 0x000, 0x000)),
    '7': (5, (0x000, 0x000, 0x01f, 0x018, 0x008, 0x008, 0x004, 0x004, 0x002, 0x002, 0x000, 0x000)),
    '8': (5, (0x000, 0x000, 0x00e, 0x011, 0x011, 0x00e, 0x011, 0x011, 0x011, 0x00e, 0x000, 0x000)),
    '9': (5, (0x000, 0x000, 0x00e, 0x011, 0x011, 0x011, 0x01e, 0x011, 0x019, 0x00e, 0x000, 0x000)),
    ':': (2, (0x000, 0x000, 0x000, 0x000, 0x001, 0x000, 0x000, 0x000, 0x000, 0x001, 0x000, 0x000)),
    ';': (2, (0x000, 0x000, 0x000, 0x000, 0x001, 0x000, 0x000, 0x000, 0x001, 0x001, 0x000, 0x000)),
    '<': (5, (0x000, 0x000, 0x000, 0x000, 0x000, 0x018, 0x006, 0x006, 0x008, 0x010, 0x000, 0x000)),
    '=': (5, (0x000, 0x000, 0x000, 0x000, 0x000, 0x01e, 0x000, 0x01e, 0x000, 0x000, 0x000, 0x000)),
    '>': (5, (0x000, 0x000, 0x000, 0x000, 0x000, 0x006, 0x018, 0x018, 0x004, 0x002, 0x000, 0x000)),
    '?': (4, (0x000, 0x000, 0x006, 0x009, 0x008, 0x008, 0x004, 0x004, 0x000, 0x004, 0x000, 0x000)),
    '@': (9, (0x000, 0x000, 0x070, 0x08c, 0x174, 0x15a, 0x14a, 0x16a, 0x0f2, 0x004, 0x078, 0x000)),
    'A': (6, (0x000, 0x000, 0x00c, 0x01c, 0x014, 0x014, 0x01e, 0x022, 0x022, 0x021, 0x000, 0x000)),
    'B': (6, (0x000, 0x000, 0x01e, 0x022, 0x022, 0x002, 0x03e, 0x022, 0x022, 0x01e, 0x000, 0x000)),
    'C': (6, (0x000, 0x000, 0x01e, 0x022, 0x021, 0x001, 0x001, 0x021, 0x022, 0x01e, 0x000, 0x000)),
    'D': (7, (0x000, 0x000, 0x01e, 0x022, 0x042, 0x042, 0x042, 0x042, 0x022, 0x01e, 0x000, 0x000)),
    'E': (6, (0x000, 0x000, 0x03e, 0x002, 0x002, 0x002, 0x01e, 0x002, 0x002, 0x03e, 0x000, 0x000)),
    'F': (6, (0x000, 0x000, 0x03e, 0x002, 0x002, 0x002, 0x01e, 0x002, 0x002, 0x002, 0x000, 0x000)),
    'G': (6, (0x000, 0x000, 0x01e, 0x032, 0x021, 0x001, 0x039, 0x021, 0x032, 0x03e, 0x000, 0x000)),
    'H': (7, (0x000, 0x000, 0x042, 0x042, 0x042, 0x042, 0x07e, 0x042, 0x042, 0x042, 0x000, 0x000)),
    'I': (2, (0x000, 0x000, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x000, 0x000)),
    'J': (5, (0x000, 0x000, 0x010, 0x010, 0x010, 0x010, 0x010, 0x012, 0x012, 0x00c, 0x000, 0x000)),
    'K': (6, (0x000, 0x000, 0x022, 0x012, 0x01a, 0x00e, 0x00e, 0x01a, 0x012, 0x022, 0x000, 0x000)),
    'L': (6, (0x000, 0x000, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x03e, 0x000, 0x000)),
    'M': (8, (0x000, 0x000, 0x0c6, 0x0c6, 0x0c6, 0x0aa, 0x0aa, 0x0aa, 0x0ba, 0x092, 0x000, 0x000)),
    'N': (7, (0x000, 0x000, 0x046, 0x046, 0x04a, 0x04a, 0x052, 0x052, 0x062, 0x062, 0x000, 0x000)),
    'O': (7, (0x000, 0x000, 0x01e, 0x022, 0x041, 0x041, 0x041, 0x041, 0x022, 0x01e, 0x000, 0x000)),
    'P': (6, (0x000, 0x000, 0x01e, 0x022, 0x022, 0x022, 0x01e, 0x002, 0x002, 0x002, 0x000, 0x000)),
    'Q': (7, (0x000, 0x000, 0x01e, 0x022, 0x041, 0x041, 0x041, 0x041, 0x022, 0x07c, 0x000, 0x000)),
    'R': (6, (0x000, 0x000, 0x01e, 0x022, 0x022, 0x022, 0x01e, 0x032, 0x022, 0x022, 0x000, 0x000)),
    'S': (6, (0x000, 0x000, 0x01c, 0x022, 0x002, 0x00c, 0x038, 0x020, 0x022, 0x01c, 0x000, 0x000)),
    'T': (6, (0x000, 0x000, 0x03e, 0x008, 0x008, 0x008, 0x008, 0x008, 0x008, 0x008, 0x000, 0x000)),
    'U': (6, (0x000, 0x000, 0x022, 0x022, 0x022, 0x022, 0x022, 0x022, 0x022, 0x01c, 0x000, 0x000)),
    'V': (6, (0x000, 0x000, 0x023, 0x022, 0x022, 0x012, 0x014, 0x014, 0x00c, 0x00c, 0x000, 0x000)),
    'W': (9, (0x000, 0x000, 0x131, 0x133, 0x132, 0x12a, 0x0ea, 0x0ca, 0x0cc, 0x0c4, 0x000, 0x000)),
    'X': (6, (0x000, 0x000, 0x022, 0x012, 0x014, 0x00c, 0x00c, 0x014, 0x012, 0x023, 0x000, 0x000)),
    'Y': (6, (0x000, 0x000, 0x022, 0x022, 0x014, 0x01c, 0x008, 0x008, 0x008, 0x008, 0x000, 0x000)),
    'Z': (6, (0x000, 0x000, 0x03e, 0x030, 0x010, 0x008, 0x008, 0x004, 0x006, 0x03e, 0x000, 0x000)),
    '[': (3, (0x000, 0x006, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x006, 0x000)),
    '\\': (3, (0x000, 0x000, 0x001, 0x001, 0x000, 0x002, 0x002, 0x002, 0x004, 0x004, 0x000, 0x000)),
    ']': (2, (0x000, 0x003, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x003, 0x000)),
    '^': (5, (0x000, 0x000, 0x000, 0x000, 0x00c, 0x00c, 0x012, 0x012, 0x000, 0x000, 0x000, 0x000)),
    '_': (4, (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x00e, 0x000)),
    '`': (2, (0x000, 0x000, 0x000, 0x002, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000)),
    'a': (4, (0x000, 0x000, 0x000, 0x000, 0x00e, 0x009, 0x00e, 0x00b, 0x009, 0x00f, 0x000, 0x000)),
    'b': (6, (0x000, 0x000, 0x002, 0x002, 0x01e, 0x022, 0x022, 0x022, 0x022, 0x01e, 0x000, 0x000)),
    'c': (5, (0x000, 0x000, 0x000, 0x000, 0x00e, 0x019, 0x001, 0x001, 0x019, 0x00e, 0x000, 0x000)),
    'd': (5, (0x000, 0x000, 0x010, 0x010, 0x01e, 0x011, 0x011, 0x011, 0x011, 0x01e, 0x000, 0x000)),
    'e': (5, (0x000, 0x000, 0x000, 0x000, 0x00e, 0x011, 0x01f, 0x001, 0x011, 0x00e, 0x000, 0x000)),
    'f': (3, (0x000, 0x004, 0x006, 0x002, 0x007, 0x002, 0x002, 0x002, 0x002, 0x002, 0x000, 0x000)),
    'g': (5, (0x000, 0x000, 0x000, 0x000, 0x01e, 0x011, 0x011, 0x011, 0x011, 0x01e, 0x011, 0x00e)),
    'h': (6, (0x000, 0x000, 0x002, 0x002, 0x01e, 0x026, 0x022, 0x022, 0x022, 0x022, 0x000, 0x000)),
    'i': (2, (0x000, 0x000, 0x002, 0x000, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x000, 0x000)),
    'j': (2, (0x000, 0x000, 0x000, 0x000, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x003)),
    'k': (5, (0x000, 0x000, 0x002, 0x002, 0x012, 0x00a, 0x00e, 0x00e, 0x01a, 0x012, 0x000, 0x000)),
    'l': (3, (0x000, 0x000, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x006, 0x000, 0x000)),
    'm': (8, (0x000, 0x000, 0x000, 0x000, 0x0fe, 0x092, 0x092, 0x092, 0x092, 0x092, 0x000, 0x000)),
    'n': (6, (0x000, 0x000, 0x000, 0x000, 0x01e, 0x026, 0x022, 0x022, 0x022, 0x022, 0x000, 0x000)),
    'o': (5, (0x000, 0x000, 0x000, 0x000, 0x00e, 0x011, 0x011, 0x011, 0x011, 0x00e, 0x000, 0x000)),
    'p': (6, (0x000, 0x000, 0x000, 0x000, 0x01e, 0x022, 0x022, 0x022, 0x022, 0x01e, 0x002, 0x002)),
    'q': (5, (0x000, 0x000, 0x000, 0x000, 0x01e, 0x011, 0x011, 0x011, 0x011, 0x01e, 0x010, 0x010)),
    'r': (4, (0x000, 0x000, 0x000, 0x000, 0x00e, 0x002, 0x002, 0x002, 0x002, 0x002, 0x000, 0x000)),
    's': (4, (0x000, 0x000, 0x000, 0x000, 0x007, 0x009, 0x003, 0x00c, 0x009, 0x00f, 0x000, 0x000)),
    't': (3, (0x000, 0x000, 0x002, 0x002, 0x007, 0x002, 0x002, 0x002, 0x002, 0x006, 0x000, 0x000)),
    'u': (6, (0x000, 0x000, 0x000, 0x000, 0x022, 0x022, 0x022, 0x022, 0x032, 0x03c, 0x000, 0x000)),
    'v': (5, (0x000, 0x000, 0x000, 0x000, 0x011, 0x013, 0x00a, 0x00a, 0x00e, 0x004, 0x000, 0x000)),
    'w': (8, (0x000, 0x000, 0x000, 0x000, 0x099, 0x059, 0x05a, 0x056, 0x066, 0x026, 0x000, 0x000)),
    'x': (5, (0x000, 0x000, 0x000, 0x000, 0x009, 0x00a, 0x006, 0x006, 0x00a, 0x019, 0x000, 0x000)),
    'y': (5, (0x000, 0x000, 0x000, 0x000, 0x011, 0x013, 0x00a, 0x00a, 0x00e, 0x004, 0x004, 0x002)),
    'z': (5, (0x000, 0x000, 0x000, 0x000, 0x01e, 0x018, 0x008, 0x004, 0x006, 0x01e, 0x000, 0x000)),
    '{': (3, (0x000, 0x006, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x006, 0x000)),
    '|': (2, (0x000, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002)),
    '}': (2, (0x000, 0x003, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x002, 0x003, 0x000)),
    '~': (6, (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x026, 0x01a, 0x000, 0x000, 0x000, 0x000)),
}
