#include "cor/image.hpp"

namespace cor {

double luma_at(const Image& img, int y, int x) {
    if (img.channels == 1) return img.at(y, x, 0);
    return 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
}

Image to_gray(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.height, img.width, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(y, x, 0) = luma_at(img, y, x);
    return out;
}

}  // namespace cor
