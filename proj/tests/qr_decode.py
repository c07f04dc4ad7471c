import sys

import zxingcpp
from PIL import Image

img = Image.open(sys.argv[1])
results = zxingcpp.read_barcodes(img, formats=zxingcpp.BarcodeFormat.QRCode)
if not results:
    sys.exit(1)
sys.stdout.write(results[0].text)
